//! Command-line front end. Every command writes a JSON [`Report`] (or a CSV table of
//! per-trial rows) and exits with 0 when all checks pass, 1 when a check fails and
//! 2 on usage or configuration errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::certificates::{build_counterexample, refute_lasq_sweep, refute_unit_h, verify_certificate};
use crate::constructions::{make_c0_sum, make_fkn, make_xn, BuiltSpace};
use crate::error::{Error, Result};
use crate::family::{block_is_full, block_of};
use crate::io::{read_points_file, read_space_spec, read_vector_file, write_table};
use crate::moduli::{
    asq_modulus, contact_point, john_sandwich_check, mvee, john_bound_certificate, random_symmetric_polytope, DenseNorm,
    ModulusConfig, JohnBoundConfig, MVEE_TOL,
};
use crate::oracle::enumerate_oracle;
use crate::random::{eps_sequence, random_unit, random_unit_sum, random_vector, trial_rng, VectorShape};
use crate::report::Report;
use crate::scalar::{Rational, Scalar, DEFAULT_REL_TOL};
use crate::space::{monotone_limit_check, sum_scale, PolyNormSpace, SumSpace};
use crate::vector::{CoordVector, SumVector};
use crate::witness::{
    component_witness, coordinate_witness, find_block_pair, linf_transfer_witness, multi_coordinate_witness,
    pair_witness, super_sequence, type_tau, RightFactor,
};

/// Largest truncation accepted in rational mode.
pub const RATIONAL_MAX_DIM: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "asqlab", version, about = "Almost-square witness search and verification suites")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    mode: Mode,
    /// Worker threads (falls back to ASQLAB_JOBS, then to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Relative tolerance for float comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Float,
    Rational,
}

#[derive(Args, Debug, Clone)]
struct Trials {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Trials {
    fn require(&self) -> Result<(usize, u64)> {
        match (self.trials, self.seed) {
            (Some(t), Some(s)) => Ok((t, s)),
            (None, _) => Err(Error::config("--trials is required")),
            (_, None) => Err(Error::config("--seed is required for randomized runs")),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Shape {
    /// Nonzero entries per random vector (default: all of --support).
    #[arg(long)]
    nnz: Option<usize>,
    /// Random entries use indices 1..=support (default: the whole truncation).
    #[arg(long)]
    support: Option<usize>,
    /// Entries are drawn from [-magnitude, magnitude].
    #[arg(long, default_value_t = 3)]
    magnitude: i64,
    /// Overwrite one entry with ±spike.
    #[arg(long)]
    spike: Option<i64>,
    /// Float mode: uniform noise of this size on every other coordinate.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl Shape {
    fn build(&self, dim: usize, default_support: usize) -> VectorShape {
        let support = self.support.unwrap_or(default_support).min(dim);
        VectorShape {
            nnz: self.nnz.unwrap_or(support),
            support,
            magnitude: self.magnitude,
            spike: self.spike,
            noise: self.noise,
            noise_support: dim,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// (1/k)|f|_inf <= |f|_{k,n} <= |f|_inf on random vectors of F_{k,n}.
    #[command(name = "verify-eq8")]
    FknSandwich {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// (1/k)|f|_inf <= |f|_N <= k|f|_inf on random vectors of X_N, plus projection monotonicity.
    #[command(name = "verify-eq9")]
    XnSandwich {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// Coordinate witness h = k e_l for unit vectors of F_{k,n}.
    #[command(name = "verify-lemma22")]
    CoordinateWitness {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Vector file (`index,value` CSV) used instead of random inputs.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// One coordinate witness for several unit vectors of F_{k,n}.
    #[command(name = "verify-remark23")]
    SharedCoordinateWitness {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Inputs per trial.
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Vector files used instead of random inputs (repeatable).
        #[arg(long)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// Block and pair search in X_N, with an independent re-check of the returned pair.
    #[command(name = "verify-lemma33")]
    BlockPairSearch {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        m: usize,
        /// Pair closeness, decimal or p/q.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// Pair witness h = e_l - e_m for unit vectors of X_N with bound 1 + 1/N.
    #[command(name = "verify-lemma34")]
    PairWitness {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        trials: Trials,
        /// Random entries default to indices 1..=m/4.
        #[command(flatten)]
        shape: Shape,
    },
    /// Component witness in the c0-sum of X_N over the given N.
    #[command(name = "verify-thm35")]
    ComponentWitness {
        #[arg(long)]
        k: usize,
        /// Even N of the components, comma separated.
        #[arg(long = "ns", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// Truncation of every component.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// Witness of the right factor placed in an l_inf-sum F_{k,n} (+)inf R.
    #[command(name = "verify-transfer")]
    VerifyTransfer {
        #[arg(long)]
        left_k: usize,
        #[arg(long)]
        left_n: usize,
        #[arg(long)]
        left_m: usize,
        #[arg(long)]
        k: usize,
        /// Right factor X_N.
        #[arg(long = "N", conflicts_with = "ns")]
        big_n: Option<usize>,
        /// Right factor c0-sum of X_N over these N.
        #[arg(long = "ns", value_delimiter = ',', requires = "eps")]
        ns: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
    /// Local search for a witness at the counterexample of X_N, with a refutation certificate for every candidate.
    #[command(name = "refute-lasq")]
    RefuteLasq {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        starts: usize,
        #[arg(long, default_value_t = 60)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        /// Run at e_4 - e_5 instead, which has good witnesses.
        #[arg(long)]
        control: bool,
        /// Additionally certify this many random unit h (oracle re-checked).
        #[arg(long, default_value_t = 0)]
        h_trials: usize,
    },
    /// Minimal-volume ellipsoid of a symmetric polytope and the sandwich check.
    #[command(name = "mvee-check")]
    MveeCheck {
        /// CSV file, one vertex per row.
        #[arg(long, conflicts_with = "shape")]
        vertices: Option<PathBuf>,
        #[arg(long, value_enum)]
        shape: Option<PolytopeShape>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Boundary samples for the inner inclusion.
        #[arg(long, default_value_t = 3600)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        containment_tol: f64,
    },
    /// Lower bound sqrt(1 + 1/d) for max |x +- h| at the contact point, over random polytopes.
    #[command(name = "prop21-sweep")]
    JohnBoundSweep {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        polytopes: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Cube-surface grid spacing, dimension <= 3 only.
        #[arg(long)]
        grid_res: Option<f64>,
    },
    /// Estimate inf over unit h of max_i max |x_i +- h| in a configured space.
    Moduli {
        /// Space JSON, inline or a file path.
        #[arg(long)]
        space: String,
        /// Unit vector files over the flattened coordinates (repeatable).
        #[arg(long = "x", required = true)]
        xs: Vec<PathBuf>,
        #[arg(long)]
        starts: usize,
        #[arg(long, default_value_t = 60)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        grid_res: Option<f64>,
    },
    /// Witness sequence over dense points of a c0-sum and the type identity tau(x) = max(|x|, 1).
    #[command(name = "lemma43-tau")]
    WitnessSequence {
        #[arg(long)]
        k: usize,
        #[arg(long = "ns", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long)]
        m: usize,
        /// Number of dense points and of eps values.
        #[arg(long)]
        points: usize,
        /// Last eps; the sequence decreases geometrically from 1/2.
        #[arg(long)]
        eps_last: f64,
        #[arg(long)]
        seed: u64,
        /// Components carrying the dense points.
        #[arg(long, default_value_t = 2)]
        active: usize,
        /// Coordinates per active component.
        #[arg(long, default_value_t = 4)]
        support: usize,
    },
    /// Closed-form norm against the enumeration oracle on random vectors.
    #[command(name = "oracle-diff")]
    OracleDiff {
        #[arg(long)]
        space: String,
        #[command(flatten)]
        trials: Trials,
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolytopeShape {
    Square,
    Cross,
    Random,
}

/// Report plus optional per-trial rows for `--format csv`.
struct Outcome {
    report: Report,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn new(report: Report, header: &[&str]) -> Self {
        Self { report, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

struct Ctx {
    rel_tol: f64,
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(passed) => i32::from(!passed),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn jobs(common: &Common) -> Result<Option<usize>> {
    if let Some(j) = common.jobs {
        return Ok(Some(j));
    }
    match std::env::var("ASQLAB_JOBS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::config(format!("ASQLAB_JOBS={v:?} is not a count"))),
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs(&cli.common)? {
        if j == 0 {
            return Err(Error::config("--jobs must be positive"));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::config(e.to_string()))?;
    let ctx = Ctx { rel_tol: cli.common.tol.unwrap_or(DEFAULT_REL_TOL) };
    let outcome = pool.install(|| dispatch(&cli.command, cli.common.mode, &ctx))?;
    let passed = outcome.report.passed;
    let mut sink: Box<dyn Write> = match &cli.common.out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match cli.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &outcome.report)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            if outcome.header.is_empty() {
                return Err(Error::config("this command has no CSV output"));
            }
            write_table(&mut sink, &outcome.header, &outcome.rows)?;
        }
    }
    sink.flush()?;
    Ok(passed)
}

fn guard_dim(mode: Mode, m: usize) -> Result<()> {
    if mode == Mode::Rational && m > RATIONAL_MAX_DIM {
        return Err(Error::config(format!("rational mode accepts m <= {RATIONAL_MAX_DIM} (got m = {m})")));
    }
    Ok(())
}

fn float_only(mode: Mode, command: &str) -> Result<()> {
    if mode == Mode::Rational {
        return Err(Error::config(format!("{command} runs in float mode only")));
    }
    Ok(())
}

macro_rules! by_mode {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            Mode::Float => $f::<f64>($($arg),*),
            Mode::Rational => $f::<Rational>($($arg),*),
        }
    };
}

fn dispatch(cmd: &Command, mode: Mode, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Command::FknSandwich { k, n, m, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_fkn(*k, *n, *m)?;
            by_mode!(mode, sandwich(&space, "verify-eq8", *k, 1, trials, shape, ctx))
        }
        Command::XnSandwich { k, big_n, m, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_xn(*k, *big_n, *m)?;
            by_mode!(mode, sandwich(&space, "verify-eq9", *k, *k, trials, shape, ctx))
        }
        Command::CoordinateWitness { k, n, m, input, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_fkn(*k, *n, *m)?;
            by_mode!(mode, coordinate_suite(&space, input.as_ref(), trials, shape, ctx))
        }
        Command::SharedCoordinateWitness { k, n, m, count, input, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_fkn(*k, *n, *m)?;
            by_mode!(mode, shared_coordinate_suite(&space, *count, input, trials, shape, ctx))
        }
        Command::BlockPairSearch { k, big_n, m, eps, count, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_xn(*k, *big_n, *m)?;
            by_mode!(mode, block_pair_suite(&space, eps, *count, trials, shape, ctx))
        }
        Command::PairWitness { k, big_n, m, count, input, trials, shape } => {
            guard_dim(mode, *m)?;
            let space = make_xn(*k, *big_n, *m)?;
            by_mode!(mode, pair_suite(&space, *count, input, trials, shape, ctx))
        }
        Command::ComponentWitness { k, ns, m, eps, count, trials, shape } => {
            guard_dim(mode, *m)?;
            let specs: Vec<(usize, usize, usize)> = ns.iter().map(|&n| (*k, n, *m)).collect();
            let space = make_c0_sum(&specs)?;
            by_mode!(mode, component_suite(&space, eps, *count, trials, shape, ctx))
        }
        Command::VerifyTransfer { left_k, left_n, left_m, k, big_n, ns, m, eps, count, trials, shape } => {
            guard_dim(mode, (*m).max(*left_m))?;
            let left = make_fkn(*left_k, *left_n, *left_m)?;
            let right = match (big_n, ns.is_empty()) {
                (Some(n), true) => RightSpec::Single(make_xn(*k, *n, *m)?),
                (None, false) => {
                    let specs: Vec<(usize, usize, usize)> = ns.iter().map(|&n| (*k, n, *m)).collect();
                    RightSpec::Sum(make_c0_sum(&specs)?, eps.clone().unwrap_or_default())
                }
                _ => return Err(Error::config("give exactly one of --N and --ns")),
            };
            by_mode!(mode, transfer(&left, &right, *count, trials, shape, ctx))
        }
        Command::RefuteLasq { k, big_n, m, starts, iters, seed, control, h_trials } => {
            guard_dim(mode, *m)?;
            let space = make_xn(*k, *big_n, *m)?;
            let mut cfg = ModulusConfig::new(*starts, *iters, *seed);
            cfg.rel_tol = ctx.rel_tol;
            by_mode!(mode, refute_lasq(&space, &cfg, *control, *h_trials, ctx))
        }
        Command::MveeCheck { vertices, shape, dim, seed, samples, containment_tol } => {
            float_only(mode, "mvee-check")?;
            mvee_check(vertices.as_ref(), *shape, *dim, *seed, *samples, *containment_tol)
        }
        Command::JohnBoundSweep { dim, polytopes, samples, seed, grid_res } => {
            float_only(mode, "prop21-sweep")?;
            john_bound_sweep(*dim, *polytopes, *samples, *seed, *grid_res)
        }
        Command::Moduli { space, xs, starts, iters, seed, grid_res } => {
            float_only(mode, "moduli")?;
            let mut cfg = ModulusConfig::new(*starts, *iters, *seed);
            cfg.grid_res = *grid_res;
            cfg.rel_tol = ctx.rel_tol;
            moduli(space, xs, &cfg)
        }
        Command::WitnessSequence { k, ns, m, points, eps_last, seed, active, support } => {
            float_only(mode, "lemma43-tau")?;
            let specs: Vec<(usize, usize, usize)> = ns.iter().map(|&n| (*k, n, *m)).collect();
            let space = make_c0_sum(&specs)?;
            witness_sequence_suite(&space, *points, *eps_last, *seed, *active, *support, ctx)
        }
        Command::OracleDiff { space, trials, shape } => {
            let spec = read_space_spec(space)?;
            let BuiltSpace::Single(space) = spec.build()? else {
                return Err(Error::config("oracle-diff takes a single space (fkn or xn)"));
            };
            guard_dim(mode, space.dim())?;
            by_mode!(mode, oracle_diff(&space, trials, shape, ctx))
        }
    }
}

/// Runs `f` for every trial index in parallel; results come back in index order and
/// the first error by index wins.
fn run_trials<T: Send>(trials: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let out: Vec<Result<T>> = (0..trials).into_par_iter().map(f).collect();
    out.into_iter().collect()
}

fn s<S: Scalar>(v: &S) -> String {
    v.to_report_string()
}

fn space_params(report: &mut Report, space: &PolyNormSpace) {
    report.param("space", space.label());
}

fn sandwich<S: Scalar>(
    space: &PolyNormSpace,
    command: &str,
    k: usize,
    upper: usize,
    trials: &Trials,
    shape: &Shape,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (count, seed) = trials.require()?;
    let m = space.dim();
    let shape = shape.build(m, m);
    // Float comparisons here are held to 1e-12 unless --tol says otherwise.
    let tol = if ctx.rel_tol == DEFAULT_REL_TOL { 1e-12 } else { ctx.rel_tol };
    let check_monotone = upper > 1;
    let results = run_trials(count, |i| {
        let f: CoordVector<S> = random_vector(&mut trial_rng(seed, i), m, &shape)?;
        let norm = space.norm(&f)?;
        let linf = f.linf();
        let lo = linf.clone() / S::from_usize(k);
        let hi = linf.clone() * S::from_usize(upper);
        let monotone = if check_monotone { Some(monotone_limit_check(space, &f, tol)?.passed()) } else { None };
        Ok((f, norm.clone(), linf, lo.le_tol(&norm, tol), norm.le_tol(&hi, tol), monotone))
    })?;
    let mut report = Report::new(command, S::MODE);
    space_params(&mut report, space);
    report.param("trials", count).param("seed", seed).param("tolerance", s(&tol));
    let mut out = Outcome::new(report, &["trial", "norm", "linf", "lower_ok", "upper_ok"]);
    let (mut lo_bad, mut hi_bad, mut mono_bad) = (0, 0, 0);
    let mut ratio = (f64::INFINITY, 0.0f64);
    for (i, (f, norm, linf, lo_ok, hi_ok, mono)) in results.iter().enumerate() {
        lo_bad += usize::from(!lo_ok);
        hi_bad += usize::from(!hi_ok);
        mono_bad += usize::from(*mono == Some(false));
        if !linf.is_zero() {
            let r = norm.to_f64() / linf.to_f64();
            ratio = (ratio.0.min(r), ratio.1.max(r));
        }
        if !lo_ok || !hi_ok || *mono == Some(false) {
            out.report.counterexample(json!({"trial": i, "f": f}));
        }
        out.rows.push(vec![i.to_string(), s(norm), s(linf), lo_ok.to_string(), hi_ok.to_string()]);
    }
    out.report.check("lower bound (1/k)|f|_inf <= |f|", lo_bad == 0, format!("{lo_bad} violations in {count} trials"));
    let factor = if upper == 1 { String::new() } else { upper.to_string() };
    out.report.check(
        &format!("upper bound |f| <= {factor}|f|_inf"),
        hi_bad == 0,
        format!("{hi_bad} violations in {count} trials"),
    );
    if check_monotone {
        out.report.check(
            "|P_K f| nondecreasing in K and equal to |f| from the last support index",
            mono_bad == 0,
            format!("{mono_bad} violations in {count} trials"),
        );
    }
    if ratio.0.is_finite() {
        out.report.summary("min_ratio_norm_over_linf", s(&ratio.0)).summary("max_ratio_norm_over_linf", s(&ratio.1));
    }
    Ok(out)
}

fn load_inputs<S: Scalar>(paths: &[PathBuf], dim: usize) -> Result<Vec<CoordVector<S>>> {
    paths.iter().map(|p| read_vector_file(p, dim)).collect()
}

/// Input vectors per trial, plus the seed when they were drawn at random.
type InputSets<S> = (Vec<Vec<CoordVector<S>>>, Option<u64>);

/// Either the inputs from files (one trial) or `count` random unit vectors per trial.
fn input_sets<S: Scalar>(
    space: &PolyNormSpace,
    paths: &[PathBuf],
    count: usize,
    trials: &Trials,
    shape: &VectorShape,
) -> Result<InputSets<S>> {
    if !paths.is_empty() {
        let mut fs = load_inputs::<S>(paths, space.dim())?;
        for f in &mut fs {
            let n = space.norm(f)?;
            if n.is_zero() {
                return Err(Error::input("input vector is zero"));
            }
            *f = f.scale(&(S::one() / n));
        }
        return Ok((vec![fs], None));
    }
    let (t, seed) = trials.require()?;
    let sets = run_trials(t, |i| {
        let mut rng = trial_rng(seed, i);
        (0..count).map(|_| random_unit(space, &mut rng, shape)).collect::<Result<Vec<_>>>()
    })?;
    Ok((sets, Some(seed)))
}

fn witness_rows<S: Scalar>(
    out: &mut Outcome,
    sets: &[Vec<CoordVector<S>>],
    reports: &[crate::witness::WitnessReport<S>],
) -> (usize, Option<S>) {
    let mut failures = 0;
    let mut worst: Option<S> = None;
    for (i, (fs, r)) in sets.iter().zip(reports).enumerate() {
        let w = r.worst().unwrap_or_else(S::zero);
        worst = Some(match worst {
            Some(cur) => S::max_of(cur, w.clone()),
            None => w.clone(),
        });
        if !r.passed() {
            failures += 1;
            out.report.counterexample(json!({"trial": i, "inputs": fs, "witness": r}));
        }
        let h: Vec<String> = r.h.entries().iter().map(|(j, v)| format!("{j}:{}", s(v))).collect();
        out.rows.push(vec![i.to_string(), h.join(" "), s(&w), s(&r.bound), r.passed().to_string()]);
    }
    (failures, worst)
}

fn coordinate_suite<S: Scalar>(space: &PolyNormSpace, input: Option<&PathBuf>, trials: &Trials, shape: &Shape, ctx: &Ctx) -> Result<Outcome> {
    let m = space.dim();
    let paths: Vec<PathBuf> = input.into_iter().cloned().collect();
    let (sets, seed) = input_sets::<S>(space, &paths, 1, trials, &shape.build(m, m))?;
    let reports = run_trials(sets.len(), |i| coordinate_witness(space, &sets[i][0], ctx.rel_tol))?;
    let mut report = Report::new("verify-lemma22", S::MODE);
    space_params(&mut report, space);
    report.param("trials", sets.len());
    if let Some(seed) = seed {
        report.param("seed", seed);
    }
    let mut out = Outcome::new(report, &["trial", "h", "worst", "bound", "passed"]);
    let (failures, worst) = witness_rows(&mut out, &sets, &reports);
    let bound = reports.first().map(|r| s(&r.bound)).unwrap_or_default();
    out.report.check(
        "h = k e_l has norm 1 and max |f +- h| <= 1 + 1/k",
        failures == 0,
        format!("{failures} failures in {} trials", sets.len()),
    );
    if let Some(w) = worst {
        out.report.summary("worst_value", s(&w));
    }
    out.report.summary("bound", bound);
    Ok(out)
}

fn shared_coordinate_suite<S: Scalar>(
    space: &PolyNormSpace,
    count: usize,
    input: &[PathBuf],
    trials: &Trials,
    shape: &Shape,
    ctx: &Ctx,
) -> Result<Outcome> {
    let m = space.dim();
    let (sets, seed) = input_sets::<S>(space, input, count, trials, &shape.build(m, m))?;
    let reports = run_trials(sets.len(), |i| multi_coordinate_witness(space, &sets[i], ctx.rel_tol))?;
    let mut report = Report::new("verify-remark23", S::MODE);
    space_params(&mut report, space);
    report.param("trials", sets.len()).param("inputs_per_trial", sets.first().map_or(0, Vec::len));
    if let Some(seed) = seed {
        report.param("seed", seed);
    }
    let mut out = Outcome::new(report, &["trial", "h", "worst", "bound", "passed"]);
    let (failures, worst) = witness_rows(&mut out, &sets, &reports);
    out.report.check(
        "one h = k e_l serves every input within 1 + 1/k",
        failures == 0,
        format!("{failures} failures in {} trials", sets.len()),
    );
    if let Some(w) = worst {
        out.report.summary("worst_value", s(&w));
    }
    Ok(out)
}

fn default_support(m: usize) -> usize {
    (m / 4).max(1)
}

/// The block conditions re-derived from scratch: `l ≠ m` in one full block `E_n`,
/// `|f_j| ≤ 1/k` on `E_n` and `|f_l − f_m| < eps`.
fn pair_conditions<S: Scalar>(k: usize, m_dim: usize, fs: &[CoordVector<S>], l: usize, m: usize, eps: &S) -> bool {
    let (Some(bl), Some(bm)) = (block_of(l), block_of(m)) else { return false };
    if l == m || bl != bm || !block_is_full(bl, m_dim) {
        return false;
    }
    let (lo, hi) = crate::family::block_bounds(bl);
    let cap = S::recip_usize(k);
    fs.iter().all(|f| (lo..=hi).all(|j| f.get(j).abs() <= cap) && (f.get(l) - f.get(m)).abs() < *eps)
}

fn xn_km(space: &PolyNormSpace) -> Result<(usize, usize, usize)> {
    match space.params() {
        crate::space::SpaceParams::Xn { k, big_n, m } => Ok((k, big_n, m)),
        _ => Err(Error::config("expected an X_N space")),
    }
}

fn block_pair_suite<S: Scalar>(
    space: &PolyNormSpace,
    eps: &str,
    count: usize,
    trials: &Trials,
    shape: &Shape,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (k, _, m) = xn_km(space)?;
    let eps = S::parse_value(eps)?;
    if !eps.is_strictly_positive() {
        return Err(Error::config("--eps must be positive"));
    }
    let (sets, seed) = input_sets::<S>(space, &[], count, trials, &shape.build(m, default_support(m)))?;
    let pairs = run_trials(sets.len(), |i| find_block_pair(space, &sets[i], &eps, ctx.rel_tol))?;
    let mut report = Report::new("verify-lemma33", S::MODE);
    space_params(&mut report, space);
    report.param("trials", sets.len()).param("inputs_per_trial", count).param("eps", s(&eps));
    if let Some(seed) = seed {
        report.param("seed", seed);
    }
    let mut out = Outcome::new(report, &["trial", "block", "l", "m", "conditions_hold"]);
    let mut bad = 0;
    for (i, (fs, p)) in sets.iter().zip(&pairs).enumerate() {
        let ok = pair_conditions(k, m, fs, p.l, p.m, &eps);
        if !ok {
            bad += 1;
            out.report.counterexample(json!({"trial": i, "inputs": fs, "pair": p}));
        }
        out.rows.push(vec![i.to_string(), p.block.to_string(), p.l.to_string(), p.m.to_string(), ok.to_string()]);
    }
    out.report.check(
        "returned pair lies in a full block with |f_j| <= 1/k there and |f_l - f_m| < eps",
        bad == 0,
        format!("{bad} failures in {} trials", sets.len()),
    );
    if let Some(max_block) = pairs.iter().map(|p| p.block).max() {
        out.report.summary("max_block", max_block);
    }
    Ok(out)
}

fn pair_suite<S: Scalar>(
    space: &PolyNormSpace,
    count: usize,
    input: &[PathBuf],
    trials: &Trials,
    shape: &Shape,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (k, big_n, m) = xn_km(space)?;
    let (sets, seed) = input_sets::<S>(space, input, count, trials, &shape.build(m, default_support(m)))?;
    let reports = run_trials(sets.len(), |i| pair_witness(space, &sets[i], ctx.rel_tol))?;
    let mut report = Report::new("verify-lemma34", S::MODE);
    space_params(&mut report, space);
    report.param("trials", sets.len()).param("inputs_per_trial", sets.first().map_or(0, Vec::len));
    if let Some(seed) = seed {
        report.param("seed", seed);
    }
    let mut out = Outcome::new(report, &["trial", "h", "worst", "bound", "passed"]);
    let (failures, worst) = witness_rows(&mut out, &sets, &reports);
    let eps = S::recip_usize(big_n);
    let mut pair_bad = 0;
    for (i, (fs, r)) in sets.iter().zip(&reports).enumerate() {
        let idx: Vec<usize> = r.h.support().collect();
        let ok = idx.len() == 2 && pair_conditions(k, m, fs, idx[0], idx[1], &eps);
        if !ok {
            pair_bad += 1;
            out.report.counterexample(json!({"trial": i, "inputs": fs, "h": r.h}));
        }
    }
    out.report.check(
        "h = e_l - e_m has norm 1 and max |f_i +- h| <= 1 + 1/N",
        failures == 0,
        format!("{failures} failures in {} trials", sets.len()),
    );
    out.report.check(
        "pair conditions re-checked with eps = 1/N",
        pair_bad == 0,
        format!("{pair_bad} failures in {} trials", sets.len()),
    );
    if let Some(w) = worst {
        out.report.summary("worst_value", s(&w));
    }
    out.report.summary("bound", s(&(S::one() + eps)));
    Ok(out)
}

fn sum_shapes(space: &SumSpace, shape: &Shape) -> Vec<VectorShape> {
    space.components.iter().map(|c| shape.build(c.dim(), default_support(c.dim()))).collect()
}

fn component_suite<S: Scalar>(space: &SumSpace, eps: &str, count: usize, trials: &Trials, shape: &Shape, ctx: &Ctx) -> Result<Outcome> {
    let eps = S::parse_value(eps)?;
    let (t, seed) = trials.require()?;
    let shapes = sum_shapes(space, shape);
    let sets = run_trials(t, |i| {
        let mut rng = trial_rng(seed, i);
        (0..count).map(|_| random_unit_sum::<S, _>(space, &mut rng, &shapes, 0.7)).collect::<Result<Vec<_>>>()
    })?;
    let reports = run_trials(t, |i| component_witness(space, &sets[i], &eps, ctx.rel_tol))?;
    let samples: Vec<SumVector<S>> = sets.iter().flatten().cloned().collect();
    let k = match space.components.first().map(PolyNormSpace::params) {
        Some(crate::space::SpaceParams::Xn { k, .. }) => k,
        _ => return Err(Error::config("empty sum")),
    };
    let interleave = crate::constructions::interleave_bounds_check(space, &samples, k, ctx.rel_tol)?;
    let mut report = Report::new("verify-thm35", S::MODE);
    let ns: Vec<String> = space.components.iter().map(|c| c.label().to_string()).collect();
    report.param("components", ns.join(" ")).param("eps", s(&eps)).param("trials", t).param("seed", seed);
    report.param("inputs_per_trial", count);
    let mut out = Outcome::new(report, &["trial", "component", "worst", "bound", "passed"]);
    let mut failures = 0;
    let mut worst: Option<S> = None;
    let target = S::one() + eps.clone();
    for (i, (fs, r)) in sets.iter().zip(&reports).enumerate() {
        let w = r.worst().unwrap_or_else(S::zero);
        worst = Some(worst.map_or(w.clone(), |c| S::max_of(c, w.clone())));
        let ok = r.passed() && r.bound < target;
        if !ok {
            failures += 1;
            out.report.counterexample(json!({"trial": i, "inputs": fs, "witness": r}));
        }
        let comp = r.params.get("M").cloned().unwrap_or_default();
        out.rows.push(vec![i.to_string(), comp, s(&w), s(&r.bound), ok.to_string()]);
    }
    let m_sel = reports.first().and_then(|r| r.params.get("M").cloned()).unwrap_or_default();
    out.report.check(
        "component witness within 1 + 1/M < 1 + eps",
        failures == 0,
        format!("{failures} failures in {t} trials"),
    );
    out.report.check(
        "interleaving T satisfies (1/k)|x| <= |Tx|_inf <= k|x| and inverts exactly",
        interleave.passed(),
        format!("ratio range [{}, {}] over {} samples", interleave.min_ratio, interleave.max_ratio, interleave.samples),
    );
    out.report.summary("component_M", m_sel);
    if let Some(w) = worst {
        out.report.summary("worst_value", s(&w));
    }
    Ok(out)
}

enum RightSpec {
    Single(PolyNormSpace),
    Sum(SumSpace, String),
}

fn transfer<S: Scalar>(
    left: &PolyNormSpace,
    right: &RightSpec,
    count: usize,
    trials: &Trials,
    shape: &Shape,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (t, seed) = trials.require()?;
    let (factor, right_sum) = match right {
        RightSpec::Single(sp) => (RightFactor::Single(sp.clone()), SumSpace { kind: crate::space::SumKind::C0, components: vec![sp.clone()] }),
        RightSpec::Sum(sp, eps) => (RightFactor::C0Sum { space: sp.clone(), eps: S::parse_value(eps)? }, sp.clone()),
    };
    let left_shape = shape.build(left.dim(), left.dim());
    let right_shapes = sum_shapes(&right_sum, shape);
    let pairs = run_trials(t, |i| {
        let mut rng = trial_rng(seed, i);
        let mut ws = Vec::with_capacity(count);
        let mut xs = Vec::with_capacity(count);
        for _ in 0..count {
            let w: CoordVector<S> = random_vector(&mut rng, left.dim(), &left_shape)?;
            let x: SumVector<S> = random_unit_sum(&right_sum, &mut rng, &right_shapes, 1.0)?;
            // Rescale so that ‖w‖ is uniform in [0, 1] relative to ‖x‖ = 1.
            let wn = left.norm(&w)?;
            let frac = S::random(&mut rng, 1).abs();
            let w = if wn.is_zero() { w } else { w.scale(&(frac / wn)) };
            ws.push(w);
            xs.push(x);
        }
        Ok((ws, xs))
    })?;
    let reports = run_trials(t, |i| linf_transfer_witness(left, &factor, &pairs[i].0, &pairs[i].1, ctx.rel_tol))?;
    let mut report = Report::new("verify-transfer", S::MODE);
    report.param("left", left.label()).param("trials", t).param("seed", seed).param("inputs_per_trial", count);
    let rl: Vec<String> = right_sum.components.iter().map(|c| c.label().to_string()).collect();
    report.param("right", rl.join(" "));
    let mut out = Outcome::new(report, &["trial", "worst", "bound", "identity_holds", "passed"]);
    let (mut failures, mut identity_bad) = (0, 0);
    let mut worst: Option<S> = None;
    for (i, r) in reports.iter().enumerate() {
        let w = r.report.worst().unwrap_or_else(S::zero);
        worst = Some(worst.map_or(w.clone(), |c| S::max_of(c, w.clone())));
        failures += usize::from(!r.report.passed());
        identity_bad += usize::from(!r.identity_holds);
        if !r.passed() {
            out.report.counterexample(json!({"trial": i, "w": pairs[i].0, "x": pairs[i].1, "witness": r}));
        }
        out.rows.push(vec![i.to_string(), s(&w), s(&r.report.bound), r.identity_holds.to_string(), r.passed().to_string()]);
    }
    out.report.check("transferred witness within the right-factor bound", failures == 0, format!("{failures} failures in {t} trials"));
    out.report.check(
        "|(w, x +- h)| = max(|w|, |x +- h|) exactly",
        identity_bad == 0,
        format!("{identity_bad} failures in {t} trials"),
    );
    if let Some(w) = worst {
        out.report.summary("worst_value", s(&w));
    }
    Ok(out)
}

fn refute_lasq<S: Scalar>(space: &PolyNormSpace, cfg: &ModulusConfig, control: bool, h_trials: usize, ctx: &Ctx) -> Result<Outcome> {
    let (_, big_n, m) = xn_km(space)?;
    let sweep = refute_lasq_sweep(space, cfg, control)?;
    let mut report = Report::new("refute-lasq", S::MODE);
    space_params(&mut report, space);
    report.param("starts", cfg.starts).param("iters", cfg.iters).param("seed", cfg.seed).param("control", control);
    report.param("h_trials", h_trials);
    let mut out = Outcome::new(report, &["trial", "case", "achieved", "threshold", "oracle_norm", "passed"]);
    out.report.summary("best_found", s(&sweep.modulus.value_upper)).summary("threshold", s(&sweep.threshold));
    out.report.summary("candidates", sweep.candidates).summary("certified", sweep.certified);
    if control {
        out.report.check(
            "control point admits max |f +- h| <= 3/2",
            sweep.passed(),
            format!("best found {}", s(&sweep.modulus.value_upper)),
        );
        return Ok(out);
    }
    out.report.check(
        "best found max |f +- h| >= 1 + 1/(3N)",
        sweep.best_meets_threshold,
        format!("best {} against {}", sweep.modulus.value_upper, s(&sweep.threshold)),
    );
    out.report.check(
        "every search candidate refuted with eps = 1/(4N)",
        sweep.failures.is_empty(),
        format!("{} of {} certified", sweep.certified, sweep.candidates),
    );
    if let Some((i, why)) = sweep.failures.first() {
        out.report.counterexample(json!({
            "start": i,
            "h": CoordVector::from_dense(&sweep.modulus.candidates[*i]),
            "reason": why,
        }));
    }
    if h_trials > 0 {
        let f: CoordVector<S> = build_counterexample(space)?;
        let eps = S::recip_usize(4 * big_n);
        let shape = VectorShape::full(m);
        let results = run_trials(h_trials, |i| {
            let h: CoordVector<S> = random_unit(space, &mut trial_rng(cfg.seed, i), &shape)?;
            match refute_unit_h(space, &f, &h, &eps, ctx.rel_tol) {
                Ok(cert) => {
                    let check = verify_certificate(space, &f, &h, &cert, ctx.rel_tol)?;
                    Ok((h, Some((cert, check)), String::new()))
                }
                Err(Error::NoCertificate(why)) => Ok((h, None, why)),
                Err(e) => Err(e),
            }
        })?;
        let mut bad = 0;
        for (i, (h, res, why)) in results.iter().enumerate() {
            let row = match res {
                Some((cert, check)) => {
                    let ok = check.passed() && cert.meets_display_bound;
                    if !ok {
                        bad += 1;
                        out.report.counterexample(json!({"trial": i, "h": h, "certificate": cert, "check": check}));
                    }
                    let case = serde_json::to_value(cert.case)?.as_str().unwrap_or("").to_string();
                    vec![i.to_string(), case, s(&cert.achieved), s(&cert.threshold), s(&check.oracle_norm), ok.to_string()]
                }
                None => {
                    bad += 1;
                    out.report.counterexample(json!({"trial": i, "h": h, "reason": why}));
                    vec![i.to_string(), "none".into(), String::new(), String::new(), String::new(), "false".into()]
                }
            };
            out.rows.push(row);
        }
        out.report.check(
            "random unit h: certificate found, a member of the norming set, oracle-verified",
            bad == 0,
            format!("{bad} failures in {h_trials} trials"),
        );
    }
    Ok(out)
}

fn polytope_vertices(shape: Option<PolytopeShape>, dim: Option<usize>, seed: Option<u64>) -> Result<Vec<Vec<f64>>> {
    match shape {
        Some(PolytopeShape::Square) => Ok(vec![vec![1.0, 1.0], vec![1.0, -1.0]]),
        Some(PolytopeShape::Cross) => {
            let d = dim.ok_or_else(|| Error::config("--dim is required for the cross-polytope"))?;
            Ok((0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
        }
        Some(PolytopeShape::Random) => {
            let d = dim.ok_or_else(|| Error::config("--dim is required for a random polytope"))?;
            let seed = seed.ok_or_else(|| Error::config("--seed is required for a random polytope"))?;
            Ok(random_symmetric_polytope(d, &mut trial_rng(seed, 0)))
        }
        None => Err(Error::config("give --vertices or --shape")),
    }
}

fn mvee_check(
    vertices: Option<&PathBuf>,
    shape: Option<PolytopeShape>,
    dim: Option<usize>,
    seed: Option<u64>,
    samples: usize,
    tol: f64,
) -> Result<Outcome> {
    let points = match vertices {
        Some(p) => read_points_file(p)?,
        None => polytope_vertices(shape, dim, seed)?,
    };
    let fit = mvee(&points, MVEE_TOL)?;
    let sandwich = john_sandwich_check(&points, &fit.ellipsoid, samples, seed.unwrap_or(0), tol)?;
    let contact = contact_point(&points, &fit.ellipsoid, tol);
    let shrunk = fit.ellipsoid.scaled(1.0 / (1.0 + 2.0 * tol));
    let outside = crate::moduli::PolytopeNorm::from_vertices(&points)?
        .vertices()
        .iter()
        .map(|v| shrunk.norm(v))
        .fold(0.0f64, f64::max);
    let mut report = Report::new("mvee-check", f64::MODE);
    report.param("dim", points[0].len()).param("points", points.len()).param("samples", samples);
    report.param("containment_tol", tol);
    if let Some(s) = shape {
        report.param("shape", format!("{s:?}").to_lowercase());
    }
    if let Some(seed) = seed {
        report.param("seed", seed);
    }
    let q = fit.ellipsoid.q();
    let rows: Vec<String> =
        (0..q.nrows()).map(|r| (0..q.ncols()).map(|c| q[(r, c)].to_report_string()).collect::<Vec<_>>().join(" ")).collect();
    report.summary("q", rows.join("; "));
    report.summary("iterations", fit.iterations).summary("gap", s(&fit.gap));
    let ev: Vec<String> = fit.ellipsoid.eigenvalues().iter().map(|v| v.to_report_string()).collect();
    report.summary("eigenvalues", ev.join(" "));
    report.check("MVEE converged", fit.converged, format!("gap {} after {} iterations", fit.gap, fit.iterations));
    report.check("B_X inside J", sandwich.outer_ok, format!("max vertex |v|_J = {}", sandwich.max_vertex_j));
    report.check(
        "n^(-1/2) J inside B_X",
        sandwich.inner_ok,
        format!("max sampled norm {} over {} samples", sandwich.max_inner_norm, sandwich.samples),
    );
    if !sandwich.passed() {
        report.counterexample(json!({"violation": sandwich.violation}));
    }
    report.check("J shrunk by 1 + 2 tol misses a vertex", outside > 1.0, format!("max vertex value {outside}"));
    match contact {
        Ok((x, j)) => {
            let xs: Vec<String> = x.iter().map(|v| v.to_report_string()).collect();
            report.summary("contact_point", xs.join(" "));
            report.check("contact point on the boundary of J", true, format!("|x|_J = {j}"));
        }
        Err(e) => {
            report.check("contact point on the boundary of J", false, e.to_string());
        }
    }
    Ok(Outcome::new(report, &[]))
}

fn john_bound_sweep(dim: usize, polytopes: usize, samples: usize, seed: u64, grid_res: Option<f64>) -> Result<Outcome> {
    if dim == 0 {
        return Err(Error::config("--dim must be positive"));
    }
    let results = run_trials(polytopes, |i| {
        let vertices = random_symmetric_polytope(dim, &mut trial_rng(seed, i));
        let cfg = JohnBoundConfig { samples, seed: seed.wrapping_add(i as u64), grid_res, tol: 1e-9 };
        john_bound_certificate(&vertices, &cfg).map(|r| (vertices, r))
    })?;
    let bound = (1.0 + 1.0 / dim as f64).sqrt();
    let mut report = Report::new("prop21-sweep", f64::MODE);
    report.param("dim", dim).param("polytopes", polytopes).param("samples", samples).param("seed", seed);
    if let Some(g) = grid_res {
        report.param("grid_res", g);
    }
    let mut out = Outcome::new(report, &["polytope", "worst_value", "bound", "violations", "mvee_iterations"]);
    let mut min_obs = f64::INFINITY;
    let mut violations = 0;
    for (i, (vertices, r)) in results.iter().enumerate() {
        min_obs = min_obs.min(r.worst_value);
        violations += r.violations;
        if !r.passed() {
            out.report.counterexample(json!({"polytope": i, "vertices": vertices, "contact": r.contact, "h": r.worst_h}));
        }
        out.rows.push(vec![
            i.to_string(),
            r.worst_value.to_report_string(),
            r.bound.to_report_string(),
            r.violations.to_string(),
            r.mvee_iterations.to_string(),
        ]);
    }
    out.report.check(
        "max |x +- h| >= sqrt(1 + 1/d) - 1e-9 at the contact point",
        violations == 0,
        format!("{violations} violations over {polytopes} polytopes"),
    );
    out.report.summary("min_observed", s(&min_obs)).summary("bound", s(&bound));
    Ok(out)
}

fn moduli(space: &str, paths: &[PathBuf], cfg: &ModulusConfig) -> Result<Outcome> {
    let spec = read_space_spec(space)?;
    let built = spec.build()?;
    let norm: &dyn DenseNorm = match &built {
        BuiltSpace::Single(s) => s,
        BuiltSpace::Sum(s) => s,
    };
    let d = norm.dim();
    let xs: Vec<Vec<f64>> = paths.iter().map(|p| read_vector_file::<f64>(p, d).map(|v| v.to_dense())).collect::<Result<_>>()?;
    let est = asq_modulus(norm, &xs, cfg)?;
    let mut report = Report::new("moduli", f64::MODE);
    report.param("space", serde_json::to_string(&spec)?).param("inputs", xs.len());
    report.param("starts", cfg.starts).param("iters", cfg.iters).param("seed", cfg.seed);
    if let Some(g) = cfg.grid_res {
        report.param("grid_res", g);
    }
    let floor = xs.iter().map(|x| norm.norm(x)).fold(1.0f64, f64::max);
    report.check(
        "value >= max(|x_i|, |h|) on every iterate",
        est.triangle_violations == 0 && est.value_upper >= floor * (1.0 - cfg.rel_tol),
        format!("{} violations, best {}", est.triangle_violations, s(&est.value_upper)),
    );
    if let Some(lo) = est.value_lower {
        report.check("grid lower bound below the search value", lo <= est.value_upper, format!("lower {lo}"));
    }
    report.summary("value_upper", s(&est.value_upper));
    if let Some(lo) = est.value_lower {
        report.summary("value_lower", s(&lo));
    }
    let h: Vec<String> = est.argmin_h.iter().map(|v| v.to_report_string()).collect();
    report.summary("argmin_h", h.join(" "));
    let mut out = Outcome::new(report, &["start", "value"]);
    out.rows = est.start_values.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_report_string()]).collect();
    Ok(out)
}

fn witness_sequence_suite(
    space: &SumSpace,
    points: usize,
    eps_last: f64,
    seed: u64,
    active: usize,
    support: usize,
    ctx: &Ctx,
) -> Result<Outcome> {
    let eps = eps_sequence(points, eps_last)?;
    let shapes: Vec<VectorShape> = space
        .components
        .iter()
        .enumerate()
        .map(|(c, sp)| {
            let sup = if c < active { support.min(sp.dim()) } else { 0 };
            VectorShape::sparse(sup, sup)
        })
        .collect();
    let mut rng = trial_rng(seed, 0);
    let dense = (0..points).map(|_| random_unit_sum::<f64, _>(space, &mut rng, &shapes, 1.0)).collect::<Result<Vec<_>>>()?;
    let seq = super_sequence(space, &dense, &eps, ctx.rel_tol)?;
    let mut xs: Vec<(String, SumVector<f64>)> = vec![("zero".into(), space.zero())];
    for (i, d) in dense.iter().enumerate() {
        xs.push((format!("dense_{i}"), d.clone()));
        xs.push((format!("double_dense_{i}"), sum_scale(d, &2.0)));
    }
    let taus = xs.iter().map(|(_, x)| type_tau(space, x, &seq, &dense)).collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("lemma43-tau", f64::MODE);
    let labels: Vec<String> = space.components.iter().map(|c| c.label().to_string()).collect();
    report.param("components", labels.join(" ")).param("points", points).param("eps_last", eps_last).param("seed", seed);
    report.param("active", active).param("support", support);
    let mut out = Outcome::new(report, &["x", "tau", "target", "tolerance", "density_gap", "passed"]);
    let bad_steps: Vec<usize> = seq.steps.iter().filter(|st| !st.holds).map(|st| st.n).collect();
    out.report.check(
        "|(|x_i +- h_n|) - 1| < eps_n for i <= n",
        bad_steps.is_empty(),
        format!("{} failing steps of {}", bad_steps.len(), seq.steps.len()),
    );
    if let Some(n) = bad_steps.first() {
        out.report.counterexample(json!({"step": seq.steps[n - 1], "points": &dense[..*n]}));
    }
    let mut bad = 0;
    for ((name, x), t) in xs.iter().zip(&taus) {
        if !t.passed {
            bad += 1;
            out.report.counterexample(json!({"x": x, "tau": t}));
        }
        out.rows.push(vec![
            name.clone(),
            t.tau.to_report_string(),
            t.target.to_report_string(),
            t.tolerance.to_report_string(),
            t.density_gap.to_report_string(),
            t.passed.to_string(),
        ]);
    }
    out.report.check(
        "|tau(x) - max(|x|, 1)| <= 2 eps_last + density gap",
        bad == 0,
        format!("{bad} failures over {} points", xs.len()),
    );
    let ms: Vec<String> = seq.steps.iter().map(|st| st.component_n.to_string()).collect();
    out.report.summary("components_used", ms.join(" "));
    Ok(out)
}

fn oracle_diff<S: Scalar>(space: &PolyNormSpace, trials: &Trials, shape: &Shape, ctx: &Ctx) -> Result<Outcome> {
    let (t, seed) = trials.require()?;
    let m = space.dim();
    let shape = shape.build(m, m);
    let results = run_trials(t, |i| {
        let f: CoordVector<S> = random_vector(&mut trial_rng(seed, i), m, &shape)?;
        let closed = space.norm(&f)?;
        let oracle = enumerate_oracle(space, &f)?;
        let equal = if S::EXACT { closed == oracle } else { closed.approx_eq(&oracle, ctx.rel_tol) };
        Ok((f, closed, oracle, equal))
    })?;
    let mut report = Report::new("oracle-diff", S::MODE);
    space_params(&mut report, space);
    report.param("trials", t).param("seed", seed);
    let mut out = Outcome::new(report, &["trial", "closed_form", "oracle", "equal"]);
    let mut bad = 0;
    for (i, (f, c, o, eq)) in results.iter().enumerate() {
        if !eq {
            bad += 1;
            out.report.counterexample(json!({"trial": i, "f": f, "closed_form": s(c), "oracle": s(o)}));
        }
        out.rows.push(vec![i.to_string(), s(c), s(o), eq.to_string()]);
    }
    let how = if S::EXACT { "exactly" } else { "within tolerance" };
    out.report.check(&format!("closed form equals the oracle {how}"), bad == 0, format!("{bad} mismatches in {t} trials"));
    Ok(out)
}
