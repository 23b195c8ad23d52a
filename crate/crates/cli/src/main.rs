//! Command-line front end: reads Matrix Market inputs, dispatches to the
//! library, and emits JSON reports (or CSV for boundary sweeps).
//!
//! Exit codes: 0 on successful computation (verdicts live in the JSON),
//! 1 on I/O or validation failure, 2 when an eigensolve failed to converge
//! (partial results are still emitted, flagged as non-certified).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tensorange::eigen::Which;
use tensorange::io as mmio;
use tensorange::numrange::{BoundKind, DiagonalBound, Method, RangeConfig};
use tensorange::oracle::ProductVector;
use tensorange::{
    alternating_ascent, boundary, certify_entanglement_witness, certify_positive_map,
    certify_rank_one_avoiding, random_subspace_study, sample_mu, symmetrize, trivial_bounds,
    w_diag, w_joint_diag, CertConfig, Error, RealMatrix, SubsystemSet, TensorShape,
};

#[derive(Parser)]
#[command(
    name = "tensorange",
    about = "Certified bounds on quadratic forms over unit tensor-product vectors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Angle,
    Ternary,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Angle => Method::Angle,
            MethodArg::Ternary => Method::Ternary,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker-thread cap (falls back to TENSORANGE_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized components and eigensolver start vectors.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Relative value tolerance of the endpoint searches.
    #[arg(long, default_value_t = 1e-9)]
    value_tol: f64,
    /// Angle tolerance (radians) of the bisection search.
    #[arg(long, default_value_t = 1e-12)]
    angle_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Certified interval endpoints for a matrix under a tensor shape.
    Bound {
        /// Factor dimensions, e.g. 3,3 or 2,2,2. Never inferred from files.
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Subsystem family for multipartite bounds: semicolon-separated
        /// comma lists, e.g. ";2;3;2,3" for {{}, {2}, {3}, {2,3}}.
        #[arg(long)]
        p_sets: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
        input: PathBuf,
    },
    /// Boundary sweep of the range; CSV by default.
    Numrange {
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        #[arg(long, default_value_t = 360)]
        angles: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[command(flatten)]
        common: CommonOpts,
        input: PathBuf,
    },
    /// Rank-one-avoidance certificate for the span of basis matrices.
    RankOne {
        /// Rows of each basis matrix.
        #[arg(long)]
        m: usize,
        /// Columns of each basis matrix.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        common: CommonOpts,
        /// Sequence of m x n Matrix Market array blocks.
        basis: PathBuf,
    },
    /// Positivity certificate for a transpose-preserving map's Choi matrix.
    PositiveMap {
        /// Input side of the map (the Choi matrix is mn x mn).
        #[arg(long)]
        m: usize,
        /// Output side of the map.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        common: CommonOpts,
        choi: PathBuf,
    },
    /// Entanglement-witness certificate for the full symmetrization.
    Witness {
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        common: CommonOpts,
        input: PathBuf,
    },
    /// Detection-probability study over Haar-random subspaces.
    Study {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Subspace dimension.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-8)]
        margin: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Inner estimates by product-vector sampling and alternating ascent.
    Oracle {
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Alternating-ascent refinements per direction.
        #[arg(long, default_value_t = 20)]
        ascents: usize,
        #[command(flatten)]
        common: CommonOpts,
        input: PathBuf,
    },
}

#[derive(Serialize)]
struct EndpointJson {
    inner: Option<f64>,
    outer: f64,
    gap: Option<f64>,
    evaluations: usize,
}

impl From<&DiagonalBound> for EndpointJson {
    fn from(b: &DiagonalBound) -> Self {
        Self {
            inner: b.inner,
            outer: b.outer,
            gap: b.gap,
            evaluations: b.evaluations,
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Bound {
            shape,
            method,
            p_sets,
            common,
            input,
        } => bound_cmd(shape, method.into(), p_sets, common, input),
        Command::Numrange {
            shape,
            angles,
            format,
            common,
            input,
        } => numrange_cmd(shape, angles, format, common, input),
        Command::RankOne {
            m,
            n,
            margin,
            method,
            common,
            basis,
        } => {
            init_threads(common.threads);
            let mats = mmio::read_basis_path(&basis, m, n)?;
            let cfg = cert_config(margin, method.into(), &common);
            let report = certify_rank_one_avoiding(&mats, &cfg)?;
            let solves_ok = report.details["certified"].as_bool().unwrap_or(true);
            emit_json(&common.out, &report)?;
            Ok(exit_for(solves_ok))
        }
        Command::PositiveMap {
            m,
            n,
            margin,
            method,
            common,
            choi,
        } => {
            init_threads(common.threads);
            let mat = mmio::read_matrix_path(&choi)?;
            let cfg = cert_config(margin, method.into(), &common);
            let report = certify_positive_map(&mat, m, n, &cfg)?;
            let solves_ok = report.details["certified"].as_bool().unwrap_or(true);
            emit_json(&common.out, &report)?;
            Ok(exit_for(solves_ok))
        }
        Command::Witness {
            shape,
            margin,
            method,
            common,
            input,
        } => {
            init_threads(common.threads);
            let mat = mmio::read_matrix_path(&input)?;
            let shape = TensorShape::new(shape)?;
            let cfg = cert_config(margin, method.into(), &common);
            let report = certify_entanglement_witness(&mat, &shape, &cfg)?;
            let solves_ok = report.details["certified"].as_bool().unwrap_or(true);
            emit_json(&common.out, &report)?;
            Ok(exit_for(solves_ok))
        }
        Command::Study {
            m,
            n,
            k,
            trials,
            margin,
            common,
        } => {
            init_threads(common.threads);
            let cfg = cert_config(margin, Method::Auto, &common);
            let report = random_subspace_study(m, n, k, trials, common.seed, &cfg)?;
            emit_json(&common.out, &report)?;
            Ok(0)
        }
        Command::Oracle {
            shape,
            samples,
            ascents,
            common,
            input,
        } => oracle_cmd(shape, samples, ascents, common, input),
    }
}

fn init_threads(threads: Option<usize>) {
    let n = threads.or_else(|| {
        std::env::var("TENSORANGE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn range_config(common: &CommonOpts) -> RangeConfig {
    let mut cfg = RangeConfig {
        value_tol: common.value_tol,
        angle_tol: common.angle_tol,
        ..Default::default()
    };
    cfg.eigen.seed = common.seed;
    cfg
}

fn cert_config(margin: f64, method: Method, common: &CommonOpts) -> CertConfig {
    CertConfig {
        range: range_config(common),
        margin,
        method,
    }
}

fn exit_for(certified: bool) -> u8 {
    if certified {
        0
    } else {
        2
    }
}

/// Symmetrizes a file-borne input that misses the symmetry tolerance; the
/// product-vector optima are unchanged, and the report carries a notice.
fn symmetrized_input(mat: RealMatrix) -> (RealMatrix, bool) {
    if mat.is_symmetric_within(tensorange::matrix::SYMMETRY_REL_TOL) {
        (mat, false)
    } else {
        let s = symmetrize(&mat);
        (s, true)
    }
}

fn parse_p_sets(arg: &str, p: usize) -> Result<Vec<SubsystemSet>, Error> {
    arg.split(';')
        .map(|group| {
            let members: Vec<usize> = group
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("bad subsystem index '{t}'")))
                })
                .collect::<Result<_, _>>()?;
            SubsystemSet::from_factors(&members, p)
        })
        .collect()
}

/// All subsets of {2, ..., p}: one representative per complement pair.
fn default_p_sets(p: usize) -> Vec<SubsystemSet> {
    let rest: Vec<usize> = (2..=p).collect();
    let mut out = Vec::with_capacity(1 << rest.len());
    for mask in 0u64..(1 << rest.len()) {
        let members: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &j)| j)
            .collect();
        out.push(SubsystemSet::from_factors(&members, p).expect("valid factors"));
    }
    out
}

fn bound_cmd(
    shape: Vec<usize>,
    method: Method,
    p_sets: Option<String>,
    common: CommonOpts,
    input: PathBuf,
) -> Result<u8, Error> {
    init_threads(common.threads);
    let shape = TensorShape::new(shape)?;
    let raw = mmio::read_matrix_path(&input)?;
    if raw.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: raw.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    let (mat, symmetrized) = symmetrized_input(raw);
    let cfg = range_config(&common);

    let p = shape.num_factors();
    let explicit = p_sets.as_deref().map(|s| parse_p_sets(s, p)).transpose()?;
    let use_joint = explicit.is_some() || p > 2;
    let family = explicit.unwrap_or_else(|| default_p_sets(p));

    let (lo, hi) = if use_joint {
        (
            w_joint_diag(&mat, &shape, &family, BoundKind::Min, &cfg)?,
            w_joint_diag(&mat, &shape, &family, BoundKind::Max, &cfg)?,
        )
    } else {
        (
            w_diag(&mat, &shape, BoundKind::Min, method, &cfg)?,
            w_diag(&mat, &shape, BoundKind::Max, method, &cfg)?,
        )
    };
    let trivial = trivial_bounds(&mat, &shape, &cfg)?;
    let certified = lo.certified && hi.certified;

    let report = json!({
        "command": "bound",
        "input": input.display().to_string(),
        "shape": shape.factor_dims(),
        "method": if use_joint { "joint".to_string() } else { format!("{method:?}").to_lowercase() },
        "p_sets": if use_joint {
            Some(family.iter().map(|s| s.members(p)).collect::<Vec<_>>())
        } else {
            None
        },
        "symmetrized": symmetrized,
        "min": EndpointJson::from(&lo),
        "max": EndpointJson::from(&hi),
        "outer_min": lo.outer,
        "outer_max": hi.outer,
        "trivial": {
            "base": trivial.base,
            "partial_transposes": trivial.transposed,
        },
        "certified": certified,
        "converged": lo.converged && hi.converged,
        "seed": common.seed,
    });
    emit_json(&common.out, &report)?;
    Ok(exit_for(certified))
}

fn numrange_cmd(
    shape: Vec<usize>,
    angles: usize,
    format: FormatArg,
    common: CommonOpts,
    input: PathBuf,
) -> Result<u8, Error> {
    init_threads(common.threads);
    let shape = TensorShape::new(shape)?;
    let raw = mmio::read_matrix_path(&input)?;
    if raw.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: raw.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    let (mat, symmetrized) = symmetrized_input(raw);
    let cfg = range_config(&common);
    let sweep = boundary(&mat, &shape, angles, &cfg)?;
    let certified = sweep.evaluations.iter().all(|e| e.certified);

    match format {
        FormatArg::Csv => {
            let mut buf = Vec::new();
            mmio::write_boundary_csv(&sweep, &mut buf)?;
            emit_bytes(&common.out, &buf)?;
        }
        FormatArg::Json => {
            let report = json!({
                "command": "numrange",
                "input": input.display().to_string(),
                "shape": shape.factor_dims(),
                "angles": angles,
                "symmetrized": symmetrized,
                "evaluations": sweep.evaluations.iter().map(|e| {
                    json!({
                        "theta": e.theta,
                        "support_value": e.support_value,
                        "re": e.point.0,
                        "im": e.point.1,
                    })
                }).collect::<Vec<_>>(),
                "outer_polygon": sweep.outer_polygon,
                "certified": certified,
            });
            emit_json(&common.out, &report)?;
        }
    }
    Ok(exit_for(certified))
}

fn oracle_cmd(
    shape: Vec<usize>,
    samples: usize,
    ascents: usize,
    common: CommonOpts,
    input: PathBuf,
) -> Result<u8, Error> {
    init_threads(common.threads);
    let shape = TensorShape::new(shape)?;
    let raw = mmio::read_matrix_path(&input)?;
    if raw.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: raw.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    let (mat, symmetrized) = symmetrized_input(raw);
    let (smin, smax) = sample_mu(&mat, &shape, samples, common.seed)?;

    let mut best_min = smin.value;
    let mut best_max = smax.value;
    let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(common.seed ^ 0xa5a5);
    for _ in 0..ascents {
        let start = ProductVector::random(&shape, &mut rng);
        let (_, up) = alternating_ascent(&mat, &shape, &start, Which::Max, 50, 1e-10)?;
        let (_, down) = alternating_ascent(&mat, &shape, &start, Which::Min, 50, 1e-10)?;
        best_max = best_max.max(up);
        best_min = best_min.min(down);
    }

    let report = json!({
        "command": "oracle",
        "input": input.display().to_string(),
        "shape": shape.factor_dims(),
        "samples": samples,
        "ascents": ascents,
        "seed": common.seed,
        "symmetrized": symmetrized,
        "sample_min": smin.value,
        "sample_max": smax.value,
        "best_min": best_min,
        "best_max": best_max,
    });
    emit_json(&common.out, &report)?;
    Ok(0)
}

fn emit_json(out: &Option<PathBuf>, value: &impl Serialize) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    emit_bytes(out, text.as_bytes())
}

fn emit_bytes(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}
