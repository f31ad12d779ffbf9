use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nptspace::bipartite::count_negative_eigenvalues;
use nptspace::sampling::PRNG_NAME;
use nptspace::sdp::{construct_via_dual_cone, solve_construction_sdp, IpmSettings, SdpOptions};
use nptspace::stress::{run_suite, Execution, StressReport, Suite};
use nptspace::{build_subspace, witness_for_state, BipartiteDims, DensityMatrix, Error};
use serde_json::{json, Value};

use crate::format::{fmt6, FormatError, Kind, MatrixFile};
use crate::report::{verify_matrix, VerifyTolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nptspace",
    version,
    about = "Maximal NPT subspaces and states with many negative partial-transpose eigenvalues"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the generators and orthonormal basis of S (and optionally its projector).
    Subspace(SubspaceArgs),
    /// Build a state whose partial transpose has (m-1)(n-1) negative eigenvalues.
    Construct(ConstructArgs),
    /// Check a matrix file: Hermitian, PSD, unit trace, partial-transpose spectrum.
    Verify(VerifyArgs),
    /// Locate the negative 2x2 minor of the partial transpose of a state supported on S.
    Witness(WitnessArgs),
    /// Run a seeded Monte Carlo property suite.
    Stress(StressArgs),
}

#[derive(Args, Debug)]
pub struct SubspaceArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the orthogonal projector onto S.
    #[arg(long)]
    pub projector: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Maximize d subject to ρ^Γ ⪯ I − dP.
    Direct,
    /// Split I − P/c into X₁ + X₂^Γ and normalize X₂.
    DualCone,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    pub method: Method,
    /// Interior-point stopping tolerance (relative gap and infeasibility).
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Interior-point iteration budget per SDP.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Output matrix file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also check that the range lies in S.
    #[arg(long)]
    pub subspace: bool,
    /// Hermiticity tolerance (default: 1e-12 relative to the largest entry).
    #[arg(long)]
    pub herm_tol: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub psd_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub trace_tol: f64,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Expected first-factor dimension; must match the file.
    #[arg(long)]
    pub m: Option<usize>,
    /// Expected second-factor dimension; must match the file.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// Mixtures supported on S are NPT and carry a witness.
    Npt,
    /// Random states have at most (m-1)(n-1) negative partial-transpose eigenvalues.
    Bound,
}

#[derive(Args, Debug)]
pub struct StressArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub json: bool,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        Self::usage(e.0)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            Error::InvalidDims(_) | Error::ShapeMismatch(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, CliError>;

/// Runs a parsed command. Human output goes to `out`, warnings to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Subspace(a) => cmd_subspace(a, out, err),
        Command::Construct(a) => cmd_construct(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Witness(a) => cmd_witness(a, out),
        Command::Stress(a) => cmd_stress(a, out),
    }
}

fn dims_arg(m: usize, n: usize, min: usize) -> Result<BipartiteDims, CliError> {
    if m < min || n < min {
        return Err(CliError::usage(format!("--m and --n must be at least {min}")));
    }
    BipartiteDims::new(m, n).map_err(|e| CliError::usage(e.to_string()))
}

fn write_file(file: &MatrixFile, path: &Path) -> Result<(), CliError> {
    file.write(path)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_subspace(args: SubspaceArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let dims = dims_arg(args.m, args.n, 1)?;
    let basis = build_subspace(dims);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", args.out.display())))?;

    let mut generators = MatrixFile::vectors(dims, basis.generators());
    generators.set_meta("content", "generators |j>|k+1> - |j+1>|k>, ordered by (j, k)");
    write_file(&generators, &args.out.join("generators.json"))?;
    let mut orthonormal = MatrixFile::vectors(dims, basis.orthonormal());
    orthonormal.set_meta(
        "content",
        "orthonormal basis of S (modified Gram-Schmidt of the generators)",
    );
    write_file(&orthonormal, &args.out.join("orthonormal.json"))?;
    if args.projector {
        let p = basis.projector();
        let mut file = MatrixFile::operator(dims, p.matrix().clone());
        file.set_meta("content", "orthogonal projector onto S");
        write_file(&file, &args.out.join("projector.json"))?;
        writeln!(out, "projector trace {}", fmt6(p.matrix().trace().re))?;
    }
    if basis.dimension() == 0 {
        writeln!(err, "warning: S is empty for m = {}, n = {}", args.m, args.n)?;
    }
    writeln!(out, "dimension {}", basis.dimension())?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(EXIT_OK)
}

pub fn cmd_construct(args: ConstructArgs, out: &mut dyn Write) -> CmdResult {
    let dims = dims_arg(args.m, args.n, 2)?;
    if !(args.tol > 0.0) || args.max_iter == 0 {
        return Err(CliError::usage("--tol must be positive and --max-iter at least 1"));
    }
    let options = SdpOptions {
        ipm: IpmSettings {
            tol: args.tol,
            max_iter: args.max_iter,
        },
        ..SdpOptions::default()
    };
    let budgets = json!({
        "ipm_max_iter": options.ipm.max_iter,
        "ipm_tol": options.ipm.tol,
        "feasibility_tol": options.feasibility,
        "gap_tol": options.gap,
        "value_gap_tol": options.value_gap,
        "residual_tol": options.residual,
    });
    let projector = build_subspace(dims).projector();
    let method = match args.method {
        Method::Direct => "direct",
        Method::DualCone => "dual-cone",
    };

    let result = match args.method {
        Method::Direct => solve_construction_sdp(dims, &projector, options).map(|s| {
            let meta = json!({
                "d": s.d,
                "d_upper_bound": s.d_upper_bound,
                "iterations": s.iterations,
                "pt_constraint_gap": s.residuals.pt_constraint_gap,
            });
            let lines = vec![
                format!("d               {}", fmt6(s.d)),
                format!("d upper bound   {}", fmt6(s.d_upper_bound)),
                format!(
                    "residuals       psd {} / pt constraint {} / trace {}",
                    fmt6(s.residuals.psd_gap),
                    fmt6(s.residuals.pt_constraint_gap),
                    fmt6(s.residuals.trace_gap)
                ),
                format!("iterations      {}", s.iterations),
            ];
            (s.rho, meta, lines)
        }),
        Method::DualCone => construct_via_dual_cone(dims, &projector, options).map(|s| {
            let meta = json!({ "c": s.c, "iterations": s.iterations, "residual": s.residual });
            let lines = vec![
                format!("c               {}", fmt6(s.c)),
                format!("residual        {}", fmt6(s.residual)),
                format!("iterations      {}", s.iterations),
            ];
            (s.rho, meta, lines)
        }),
    };

    let write_state = |rho: &DensityMatrix, converged: bool, solution: Value| -> Result<(), CliError> {
        let mut file = MatrixFile::operator(dims, rho.matrix().clone());
        file.set_meta("method", method)
            .set_meta("converged", converged)
            .set_meta("solver_budgets", budgets.clone())
            .set_meta("solution", solution);
        write_file(&file, &args.out)
    };

    match result {
        Ok((rho, meta, lines)) => {
            write_state(&rho, true, meta)?;
            let neg = count_negative_eigenvalues(&rho.partial_transpose()).map_err(CliError::from)?;
            writeln!(out, "method          {method}")?;
            for l in lines {
                writeln!(out, "{l}")?;
            }
            let values: Vec<String> = neg.values.iter().map(|&v| fmt6(v)).collect();
            writeln!(out, "negatives       {} [{}]", neg.count, values.join(", "))?;
            writeln!(out, "wrote {}", args.out.display())?;
            Ok(EXIT_OK)
        }
        Err(Error::NoConvergence {
            stage,
            iterations,
            detail,
            partial,
        }) => {
            if let Some(rho) = partial {
                write_state(&rho, false, json!({ "stage": stage, "iterations": iterations }))?;
                writeln!(out, "wrote partial result to {}", args.out.display())?;
            }
            Err(CliError {
                code: EXIT_NO_CONVERGENCE,
                message: format!("{stage} did not converge after {iterations} iterations: {detail}"),
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let file = MatrixFile::read(&args.input)?;
    if file.kind != Kind::Operator {
        return Err(CliError::usage("verify expects an operator document"));
    }
    let dims = file.dims()?;
    let tolerances = VerifyTolerances {
        hermitian: args.herm_tol,
        psd: args.psd_tol,
        trace: args.trace_tol,
    };
    let report = verify_matrix(dims, &file.matrix, tolerances, args.subspace)?;
    if args.json {
        out.write_all(report.to_json().as_bytes())?;
    } else {
        out.write_all(report.to_text().as_bytes())?;
    }
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json())
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if report.is_state() { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_witness(args: WitnessArgs, out: &mut dyn Write) -> CmdResult {
    let file = MatrixFile::read(&args.input)?;
    if file.kind != Kind::Operator {
        return Err(CliError::usage("witness expects an operator document"));
    }
    if args.m.is_some_and(|m| m != file.m) || args.n.is_some_and(|n| n != file.n) {
        return Err(CliError::usage(format!(
            "file holds a {} x {} state, which does not match --m/--n",
            file.m, file.n
        )));
    }
    let dims = file.dims()?;
    let rho = DensityMatrix::new(dims, file.matrix).map_err(|e| CliError::failure(e.to_string()))?;
    let basis = build_subspace(dims);
    let cert = witness_for_state(&rho, &basis)?;
    let identity_error = (cert.determinant + cert.mixture_sum.norm_sqr()).abs();
    let label = |(j, k): (usize, usize)| format!("|{j}{k}>");
    if args.json {
        let c = |z: nptspace::C64| [z.re, z.im];
        let doc = json!({
            "alpha": [cert.alpha.0, cert.alpha.1],
            "beta": [cert.beta.0, cert.beta.1],
            "antidiagonal": cert.antidiag_index,
            "submatrix": [[c(cert.submatrix[0][0]), c(cert.submatrix[0][1])],
                          [c(cert.submatrix[1][0]), c(cert.submatrix[1][1])]],
            "determinant": cert.determinant,
            "mixture_sum": c(cert.mixture_sum),
            "identity_error": identity_error,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("plain JSON"))?;
    } else {
        let z = |v: nptspace::C64| format!("{} + {}i", fmt6(v.re), fmt6(v.im));
        writeln!(out, "alpha           {}", label(cert.alpha))?;
        writeln!(out, "beta            {}", label(cert.beta))?;
        writeln!(out, "anti-diagonal   {}", cert.antidiag_index)?;
        writeln!(
            out,
            "submatrix       [{}, {}]",
            z(cert.submatrix[0][0]),
            z(cert.submatrix[0][1])
        )?;
        writeln!(
            out,
            "                [{}, {}]",
            z(cert.submatrix[1][0]),
            z(cert.submatrix[1][1])
        )?;
        writeln!(out, "determinant     {}", fmt6(cert.determinant))?;
        writeln!(out, "mixture sum     {}", z(cert.mixture_sum))?;
        writeln!(out, "identity error  {}", fmt6(identity_error))?;
    }
    Ok(EXIT_OK)
}

pub fn stress_json(report: &StressReport) -> String {
    let failures: Vec<Value> = report
        .failures()
        .map(|o| json!({ "index": o.index, "seed": o.seed, "reason": o.failure }))
        .collect();
    let mut histogram = vec![0u64; report.max_negative_count() + 1];
    for o in &report.outcomes {
        histogram[o.negative_count] += 1;
    }
    let doc = json!({
        "suite": match report.suite { Suite::Npt => "npt", Suite::Bound => "bound" },
        "m": report.dims.m(),
        "n": report.dims.n(),
        "trials": report.trials(),
        "base_seed": report.base_seed,
        "prng": PRNG_NAME,
        "passed": report.trials() - report.failure_count(),
        "failures": failures,
        "negative_count_histogram": histogram,
        "min_pt_eigenvalue_max": report.outcomes.iter().map(|o| o.min_pt_eigenvalue).fold(f64::NEG_INFINITY, f64::max),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("plain JSON");
    s.push('\n');
    s
}

pub fn cmd_stress(args: StressArgs, out: &mut dyn Write) -> CmdResult {
    let dims = dims_arg(args.m, args.n, 1)?;
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let suite = match args.suite {
        SuiteArg::Npt => Suite::Npt,
        SuiteArg::Bound => Suite::Bound,
    };
    if suite == Suite::Npt && dims.max_negative_count() == 0 {
        return Err(CliError::usage("the npt suite needs m, n >= 2"));
    }
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let report = run_suite(suite, dims, args.trials, args.seed, execution)?;
    if args.json {
        out.write_all(stress_json(&report).as_bytes())?;
    } else {
        let name = match suite {
            Suite::Npt => "npt",
            Suite::Bound => "bound",
        };
        writeln!(
            out,
            "suite {name} at {} x {}: {}/{} passed (seeds {}..)",
            args.m,
            args.n,
            report.trials() - report.failure_count(),
            report.trials(),
            args.seed
        )?;
        writeln!(
            out,
            "max negative count {} (cap {})",
            report.max_negative_count(),
            dims.max_negative_count()
        )?;
        for f in report.failures() {
            writeln!(
                out,
                "FAILED trial {} seed {}: {}",
                f.index,
                f.seed,
                f.failure.as_deref().unwrap_or("")
            )?;
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}
