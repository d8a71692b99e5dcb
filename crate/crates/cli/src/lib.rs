//! Command-line front end: JSON matrices in, one JSON report out.
//!
//! Exit codes: 0 accepted, 1 mathematical rejection, 2 malformed input.

pub mod matrix_file;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use awkit::lattice::{closure_correspondence, generate_masa, monotone_closure, Subalgebra};
use awkit::order::{build_certificate, verify_certificate};
use awkit::polar::{
    polar_direct, polar_regularized, polar_residuals, sequence_inequality_violations, spectral_cut,
    DEFAULT_N_MAX,
};
use awkit::spectral::{
    check_regularity, integrate, regularity_residual, spectral_measure, SpectralFunction,
};
use awkit::suites::{run_all, SuiteConfig};
use awkit::{operator_norm, AlgebraError, Element, Tolerances};

pub use matrix_file::MatrixFile;
pub use report::Report;

/// Largest spectrum on which the regularity check enumerates all subsets.
const MAX_REGULARITY_POINTS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input: exit 2, nothing on standard output.
    Input(String),
    /// The input is well formed but fails a mathematical precondition: exit 1.
    Rejected(String),
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        use AlgebraError::*;
        match e {
            Malformed(_)
            | SignatureMismatch { .. }
            | InvalidTolerance(_)
            | EmptySequence
            | IncompleteOrdering
            | UnknownPoint(_)
            | IncompleteFunction(_) => CliError::Input(e.to_string()),
            _ => CliError::Rejected(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "awkit",
    version,
    about = "Operator-algebra workbench on finite-dimensional *-algebras"
)]
pub struct Cli {
    /// Absolute slack for positivity and identity checks.
    #[arg(long, global = true, env = "AWKIT_POS_SLACK")]
    pub pos_slack: Option<f64>,
    /// Relative radius under which spectral points are merged.
    #[arg(long, global = true, env = "AWKIT_CLUSTER_TOL")]
    pub cluster_tol: Option<f64>,
    /// Relative threshold below which singular values count as zero.
    #[arg(long, global = true, env = "AWKIT_RANK_CUTOFF")]
    pub rank_cutoff: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarMethod {
    Regularized,
    Direct,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polar decomposition x = |x*|u = u|x|.
    Polar {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: u64,
        #[arg(long, value_enum, default_value_t = PolarMethod::Regularized)]
        method: PolarMethod,
    },
    /// Spectral measure of a normal element.
    Spectral { file: PathBuf },
    /// Spectral cut: p and a with a|x*| = p.
    Cut {
        file: PathBuf,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Monotone closures of the algebra generated by the file's element in
    /// two seeded maximal commutative subalgebras.
    Closure {
        file: PathBuf,
        #[arg(long)]
        seed1: u64,
        #[arg(long)]
        seed2: u64,
    },
    /// Order-convergence certificate for the matrix files of a directory,
    /// taken in filename order.
    Certify {
        dir: PathBuf,
        #[arg(long)]
        limit: PathBuf,
        #[arg(long)]
        rate: f64,
    },
    /// The regularized-sequence inequality for one pair of indices.
    Ineq {
        file: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Runs every acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Block dimension range, `LO..HI` inclusive.
        #[arg(long, default_value = "1..8", value_parser = parse_dims)]
        dims: (usize, usize),
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo == 0 || hi < lo {
        return Err(format!("need 1 <= LO <= HI, got {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// What the binary prints and returns.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let name = command_name(&cli.command);
    let tol = match tolerances(&cli) {
        Ok(t) => t,
        Err(e) => return failure(name, &Tolerances::default(), e),
    };
    match dispatch(&cli.command, &tol) {
        Ok(report) => Outcome {
            code: if report.accepted { 0 } else { 1 },
            stderr: report
                .error
                .clone()
                .map(|e| format!("awkit {name}: {e}\n"))
                .unwrap_or_default(),
            stdout: report.to_json(),
        },
        Err(e) => failure(name, &tol, e),
    }
}

fn failure(name: &str, tol: &Tolerances, e: CliError) -> Outcome {
    match e {
        CliError::Input(msg) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("awkit {name}: {msg}\n"),
        },
        CliError::Rejected(msg) => {
            let mut report = Report::new(name, tol);
            report.reject(msg.clone());
            Outcome {
                code: 1,
                stdout: report.to_json(),
                stderr: format!("awkit {name}: {msg}\n"),
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Polar { .. } => "polar",
        Command::Spectral { .. } => "spectral",
        Command::Cut { .. } => "cut",
        Command::Closure { .. } => "closure",
        Command::Certify { .. } => "certify",
        Command::Ineq { .. } => "ineq",
        Command::Selftest { .. } => "selftest",
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    if let Some(v) = cli.pos_slack {
        t.pos_slack = v;
    }
    if let Some(v) = cli.cluster_tol {
        t.cluster_tol = v;
    }
    if let Some(v) = cli.rank_cutoff {
        t.rank_cutoff = v;
    }
    t.validate()?;
    Ok(t)
}

fn dispatch(c: &Command, tol: &Tolerances) -> Result<Report, CliError> {
    match c {
        Command::Polar { file, nmax, method } => polar(file, *nmax, *method, tol),
        Command::Spectral { file } => spectral(file, tol),
        Command::Cut { file, mu } => cut(file, *mu, tol),
        Command::Closure { file, seed1, seed2 } => closure(file, *seed1, *seed2, tol),
        Command::Certify { dir, limit, rate } => certify(dir, limit, *rate, tol),
        Command::Ineq { file, n, m } => ineq(file, *n, *m, tol),
        Command::Selftest { trials, seed, dims } => selftest(*trials, *seed, *dims, tol),
    }
}

fn m(x: &Element) -> MatrixFile {
    MatrixFile::from_element(x)
}

/// `pos_slack·(1 + scale)·dim`: the slack of one entry-level identity,
/// widened by the dimension for Frobenius norms.
fn threshold(tol: &Tolerances, scale: f64, x: &Element) -> f64 {
    tol.slack(scale) * x.signature().total_dim() as f64
}

fn polar(
    file: &Path,
    nmax: u64,
    method: PolarMethod,
    tol: &Tolerances,
) -> Result<Report, CliError> {
    let x = MatrixFile::read_element(file)?;
    if nmax == 0 {
        return Err(CliError::Input("--nmax must be at least 1".into()));
    }
    let mut report = Report::new("polar", tol);
    let result = match method {
        PolarMethod::Direct => polar_direct(&x, tol)?,
        PolarMethod::Regularized => polar_regularized(&x, nmax, tol)?,
    };
    let r = polar_residuals(&x, &result.u, tol)?;
    report.residual(
        "partial_isometry",
        r.partial_isometry,
        r.projection_threshold,
    );
    report.residual("source_projection", r.source, r.projection_threshold);
    report.residual("target_projection", r.target, r.projection_threshold);
    report.residual("left_reconstruction", r.left, r.reconstruction_threshold);
    report.residual("right_reconstruction", r.right, r.reconstruction_threshold);
    if method == PolarMethod::Regularized {
        let oracle = polar_direct(&x, tol)?;
        report.residual(
            "oracle_agreement",
            (&result.u - &oracle.u).frobenius_norm(),
            10.0 * tol.rank_cutoff,
        );
    }
    report.artifact("method", format!("{method:?}").to_lowercase());
    report.artifact("u", m(&result.u));
    report.artifact("absx", m(&result.absx));
    report.artifact("absxstar", m(&result.absxstar));
    report.artifact("diagnostics", &result.diagnostics);
    report.artifact("snap_correction", result.snap_correction);
    report.artifact("sigma_min", result.sigma_min);
    Ok(report)
}

#[derive(Serialize)]
struct Point {
    re: f64,
    im: f64,
    multiplicity: usize,
}

fn spectral(file: &Path, tol: &Tolerances) -> Result<Report, CliError> {
    let a = MatrixFile::read_element(file)?;
    let measure = spectral_measure(&a, tol)?;
    let mut report = Report::new("spectral", tol);
    let spectrum = measure.spectrum();
    let back = integrate(&SpectralFunction::identity(spectrum), &measure)?;
    report.residual(
        "reconstruction",
        (&back - &a).frobenius_norm(),
        threshold(tol, operator_norm(&a), &a),
    );
    report.residual(
        "measure_axioms",
        measure.axiom_residual(),
        threshold(tol, 1.0, &a),
    );
    if spectrum.len() <= MAX_REGULARITY_POINTS {
        let value = regularity_residual(&measure)?;
        let ok = check_regularity(&measure, tol)?;
        report.flag(
            "regularity",
            value,
            tol.slack(1.0) * a.signature().total_dim() as f64,
            ok,
        );
    } else {
        report.artifact("regularity", "skipped: more than 12 spectral points");
    }
    let points: Vec<Point> = spectrum
        .points
        .iter()
        .map(|p| Point {
            re: p.value.re,
            im: p.value.im,
            multiplicity: p.multiplicity,
        })
        .collect();
    report.artifact("spectrum", points);
    report.artifact(
        "atoms",
        measure
            .atoms()
            .iter()
            .map(|p| m(p.element()))
            .collect::<Vec<_>>(),
    );
    Ok(report)
}

fn cut(file: &Path, mu: Option<f64>, tol: &Tolerances) -> Result<Report, CliError> {
    let x = MatrixFile::read_element(file)?;
    if let Some(mu) = mu {
        if !mu.is_finite() {
            return Err(CliError::Input(format!("--mu must be finite, got {mu}")));
        }
    }
    let c = spectral_cut(&x, mu, tol)?;
    let r = c.residuals(&x, tol)?;
    let mut report = Report::new("cut", tol);
    let thr = threshold(tol, operator_norm(&x), &x);
    report.residual("commutators", r.commutators, thr);
    report.residual("a_absxstar_minus_p", r.product, thr);
    report.residual("root_minus_p", r.root, thr);
    report.flag("p_nonzero", c.p.rank() as f64, 1.0, !c.p.is_zero(tol));
    report.artifact("branch", c.branch.name());
    report.artifact("mu", c.mu);
    report.artifact("p", m(c.p.element()));
    report.artifact("a", m(&c.a));
    Ok(report)
}

fn closure(file: &Path, seed1: u64, seed2: u64, tol: &Tolerances) -> Result<Report, CliError> {
    let b_gen = MatrixFile::read_element(file)?;
    let sig = b_gen.signature();
    let d1 = generate_masa(std::slice::from_ref(&b_gen), seed1, tol)?;
    let d2 = generate_masa(std::slice::from_ref(&b_gen), seed2, tol)?;
    let b = Subalgebra::generated_by(&sig, std::slice::from_ref(&b_gen), tol)?;
    let c1 = monotone_closure(&b, &d1, tol)?;
    let c2 = monotone_closure(&b, &d2, tol)?;
    let corr = closure_correspondence(&b, &d1, &d2, tol)?;
    let mut report = Report::new("closure", tol);
    report.seed = Some(seed1);
    report.residual(
        "closure_angle",
        c1.principal_angle_sine(&c2),
        tol.cluster_tol,
    );
    report.residual(
        "closure_vs_generated",
        c1.principal_angle_sine(&b),
        tol.cluster_tol,
    );
    report.residual("correspondence_delta", corr.max_delta(), tol.cluster_tol);
    report.residual(
        "product_preservation",
        corr.product_residual(tol)?,
        tol.cluster_tol,
    );
    report.residual(
        "lattice_preservation",
        corr.lattice_residual(tol)?,
        tol.cluster_tol,
    );
    report.flag(
        "bijective",
        corr.min_image_separation().min(f64::MAX),
        tol.slack(1.0),
        corr.is_bijective(tol),
    );
    report.artifact("seeds", [seed1, seed2]);
    report.artifact("generated_dim", b.dim());
    report.artifact("masa_angle", d1.principal_angle_sine(&d2));
    report.artifact("closure1", c1.basis().iter().map(m).collect::<Vec<_>>());
    report.artifact("closure2", c2.basis().iter().map(m).collect::<Vec<_>>());
    report.artifact("projections", corr.pairs.len());
    Ok(report)
}

fn certify(dir: &Path, limit: &Path, rate: f64, tol: &Tolerances) -> Result<Report, CliError> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(CliError::Input(format!(
            "--rate must be finite and >= 0, got {rate}"
        )));
    }
    let limit_el = MatrixFile::read_element(limit)?;
    let limit_canon = limit.canonicalize().ok();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Input(e.to_string()))?.path();
        let is_json = path.extension().is_some_and(|e| e == "json");
        if is_json && path.is_file() && path.canonicalize().ok() != limit_canon {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if files.is_empty() {
        return Err(CliError::Input(format!(
            "{} contains no .json matrix files",
            dir.display()
        )));
    }
    let seq = files
        .iter()
        .map(|p| MatrixFile::read_element(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::new("certify", tol);
    report.artifact(
        "sequence",
        files
            .iter()
            .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect::<Vec<_>>(),
    );
    let cert = build_certificate(&seq, &limit_el, rate, tol)?;
    let verdict = verify_certificate(&cert, tol);
    report.flag(
        "certificate",
        verdict.worst_residual,
        tol.slack(operator_norm(&limit_el)),
        verdict.accepted,
    );
    report.artifact("envelope", &cert.envelope.eps);
    report.artifact("tail_rate", rate);
    report.artifact(
        "failing_condition",
        verdict.failing_condition.map(|c| c.tag()),
    );
    if !verdict.accepted {
        report.reject(format!(
            "certificate rejected: {}",
            verdict.failing_condition.map_or("unknown", |c| c.tag())
        ));
    }
    Ok(report)
}

fn ineq(file: &Path, n: u64, mm: u64, tol: &Tolerances) -> Result<Report, CliError> {
    let x = MatrixFile::read_element(file)?;
    if n == 0 || mm == 0 {
        return Err(CliError::Input("--n and --m must be at least 1".into()));
    }
    let (lower, upper) = sequence_inequality_violations(&x, n, mm, tol)?;
    let mut report = Report::new("ineq", tol);
    report.residual("lower_violation", lower, tol.pos_slack);
    report.residual("upper_violation", upper, tol.pos_slack);
    report.artifact("n", n);
    report.artifact("m", mm);
    if !report.accepted {
        report.reject("inequality violated");
    }
    Ok(report)
}

#[derive(Serialize)]
struct CriterionRow {
    id: u8,
    name: &'static str,
    passed: bool,
    trials: usize,
    worst: f64,
    threshold: f64,
    detail: String,
}

fn selftest(
    trials: usize,
    seed: u64,
    dims: (usize, usize),
    tol: &Tolerances,
) -> Result<Report, CliError> {
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let cfg = SuiteConfig {
        trials,
        seed,
        min_dim: dims.0,
        max_dim: dims.1,
        tol: *tol,
    };
    let outcomes = run_all(&cfg);
    let mut report = Report::new("selftest", tol);
    report.seed = Some(seed);
    for o in &outcomes {
        report.flag(
            &format!("{:02}-{}", o.id, o.name),
            o.worst,
            o.threshold,
            o.passed,
        );
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.to_string())
        .collect();
    report.artifact("trials", trials);
    report.artifact("dims", [dims.0, dims.1]);
    report.artifact(
        "criteria",
        outcomes
            .into_iter()
            .map(|o| CriterionRow {
                id: o.id,
                name: o.name,
                passed: o.passed,
                trials: o.trials,
                worst: o.worst,
                threshold: o.threshold,
                detail: o.detail,
            })
            .collect::<Vec<_>>(),
    );
    if !failed.is_empty() {
        report.reject(failed.join("\n"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parser() {
        assert_eq!(parse_dims("1..8"), Ok((1, 8)));
        assert_eq!(parse_dims("2..=3"), Ok((2, 3)));
        assert!(parse_dims("0..3").is_err());
        assert!(parse_dims("4..3").is_err());
        assert!(parse_dims("4").is_err());
    }

    #[test]
    fn algebra_errors_map_to_exit_classes() {
        assert!(matches!(
            CliError::from(AlgebraError::EmptySequence),
            CliError::Input(_)
        ));
        assert!(matches!(
            CliError::from(AlgebraError::NotNormal { residual: 1.0 }),
            CliError::Rejected(_)
        ));
    }
}
