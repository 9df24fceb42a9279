//! Command-line surface for the crossed-product toolkit.
//!
//! Every subcommand reads UTF-8 JSON files, writes a JSON report to stdout
//! (and to `--out` when given), and exits with 0 on success, 1 on a
//! precondition or validation failure, 2 on parse errors, 3 on resource
//! caps. Reports embed the resolved configuration so a run can be
//! reproduced from its own output plus the input files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use xprod::endo::{extend_system, orthogonality, CommutativeSystem, Endomorphism};
use xprod::io;
use xprod::matcalc::CpMatrix;
use xprod::norms::{
    csnorm_estimate, diagonal_norm_exact, diagonal_norm_limit_with_meta, seminorm,
    EstimateOptions, ReportConfig, Schedule,
};
use xprod::rep::{build_path_rep, compare_reps, CovariantRep};
use xprod::{Complex, Error, Tol};

#[derive(Parser)]
#[command(
    name = "xprod",
    version,
    about = "Crossed products of finite-dimensional C*-algebras by endomorphisms",
    after_help = "File formats are documented in the library README. All block\n\
                  and point indices in files are 1-based."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Tolerance for all approximate comparisons.
    #[arg(long, default_value_t = Tol::DEFAULT)]
    tol: f64,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel ideal of the system's endomorphism.
    Kernel {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Largest ideal orthogonal to the given one, and its orthogonality
    /// to the kernel.
    Iperp {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extend the system by an orthogonal ideal so the kernel gains a unit.
    Extend {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Convolution product of two matrix elements.
    Star {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Norm of a single-diagonal element under the chosen ideal.
    Norm {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        /// exact: finite quotient-distance formula; limit: orbit route.
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Ideal-dependent seminorm of a matrix element.
    Seminorm {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// C*-norm estimate through even convolution powers.
    Estimate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long, default_value = "linear")]
        schedule: String,
        /// Abort when a power's support exceeds this many entries.
        #[arg(long, default_value_t = 10_000)]
        support_cap: usize,
        /// Also write the estimate sequence as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the covariance axioms of a representation file.
    RepValidate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build a path-space representation of a commutative system.
    RepBuildPath {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Operator norm of an element in a representation.
    RepNorm {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two representations on deterministic samples.
    RepCompare {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        rep1: PathBuf,
        #[arg(long)]
        rep2: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run a bundled walkthrough: variety, strict-vs-associated, fourier.
    Demo {
        name: String,
        #[arg(long, default_value_t = Tol::DEFAULT)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::CornerViolation { .. } => 2,
        Error::SupportCap { .. } => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> xprod::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(e))
}

fn load_system(path: &Path, tol: f64) -> xprod::Result<io::LoadedSystem> {
    io::system_from_str(&read(path)?, Tol::new(tol))
}

fn load_element(path: &Path, sys: &Endomorphism) -> xprod::Result<CpMatrix> {
    io::cpmatrix_from_str(&read(path)?, sys)
}

fn load_ideal(path: &Path, sys: &Endomorphism) -> xprod::Result<xprod::algebra::Ideal> {
    io::ideal_from_str(&read(path)?, sys.algebra())
}

fn load_rep(path: &Path, sys: &Endomorphism) -> xprod::Result<CovariantRep> {
    io::rep_from_str(&read(path)?, sys)
}

/// Print the report and, if requested, persist it in one write.
fn emit(report: &Value, out: Option<&Path>) -> xprod::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("serializing plain data");
    println!("{text}");
    if let Some(path) = out {
        fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn run(command: Command) -> xprod::Result<()> {
    match command {
        Command::Kernel { system, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let report = json!({
                "kernel": io::ideal_to_json(&sys.kernel()),
                "config": ReportConfig::bare(common.tol),
            });
            emit(&report, common.out.as_deref())
        }
        Command::Iperp { system, ideal, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let i = load_ideal(&ideal, &sys)?;
            let kernel = sys.kernel();
            let orth = orthogonality(&i, &kernel);
            let report = json!({
                "ideal": io::ideal_to_json(&i),
                "iperp": io::ideal_to_json(&orth.iperp),
                "orthogonal_to_kernel": orth.orthogonal,
                "kernel": io::ideal_to_json(&kernel),
                "config": ReportConfig::bare(common.tol),
            });
            emit(&report, common.out.as_deref())
        }
        Command::Extend { system, ideal, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let j = load_ideal(&ideal, &sys)?;
            let ext = extend_system(&sys, &j)?;
            let mut report = io::extended_system_to_json(&ext);
            report["config"] =
                serde_json::to_value(ReportConfig::bare(common.tol)).expect("plain data");
            emit(&report, common.out.as_deref())
        }
        Command::Star { system, lhs, rhs, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let a = load_element(&lhs, &sys)?;
            let b = load_element(&rhs, &sys)?;
            let mut report = io::cpmatrix_to_json(&a.star(&b));
            report["config"] =
                serde_json::to_value(ReportConfig::bare(common.tol)).expect("plain data");
            emit(&report, common.out.as_deref())
        }
        Command::Norm { system, element, ideal, method, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let x = load_element(&element, &sys)?;
            let j = load_ideal(&ideal, &sys)?;
            let diagonals = x.diagonals();
            if diagonals.len() > 1 {
                return Err(Error::InvalidInput(format!(
                    "element spans diagonals {diagonals:?}; the graded norm needs a single \
                     diagonal, use `seminorm` for mixed elements"
                )));
            }
            let d = x.diagonal(diagonals.first().copied().unwrap_or(0));
            let report = match method.as_str() {
                "exact" => json!({
                    "method": "exact",
                    "values": [diagonal_norm_exact(&d, &j)?],
                    "config": ReportConfig::bare(common.tol),
                }),
                "limit" => {
                    let (value, orbit) = diagonal_norm_limit_with_meta(&d, &j)?;
                    json!({
                        "method": "limit",
                        "values": [value],
                        "transient": orbit.transient,
                        "period": orbit.period,
                        "config": ReportConfig::bare(common.tol),
                    })
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown method `{other}`, expected exact or limit"
                    )))
                }
            };
            emit(&report, common.out.as_deref())
        }
        Command::Seminorm { system, element, ideal, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let x = load_element(&element, &sys)?;
            let j = load_ideal(&ideal, &sys)?;
            let per_diagonal: Vec<Value> = x
                .diagonals()
                .into_iter()
                .map(|k| {
                    diagonal_norm_exact(&x.diagonal(k), &j)
                        .map(|v| json!({"k": k, "value": v}))
                })
                .collect::<xprod::Result<_>>()?;
            let report = json!({
                "method": "seminorm",
                "values": [seminorm(&x, &j)?],
                "diagonals": per_diagonal,
                "config": ReportConfig::bare(common.tol),
            });
            emit(&report, common.out.as_deref())
        }
        Command::Estimate {
            system,
            element,
            ideal,
            kmax,
            schedule,
            support_cap,
            csv,
            common,
        } => {
            let sys = load_system(&system, common.tol)?.endo;
            let x = load_element(&element, &sys)?;
            let j = load_ideal(&ideal, &sys)?;
            let opts = EstimateOptions {
                kmax,
                schedule: schedule.parse::<Schedule>()?,
                support_cap,
            };
            let report = csnorm_estimate(&x, &j, &opts)?;
            if let Some(csv_path) = csv {
                let mut text = String::from("k,power,estimate\n");
                let powers = report.k_schedule.clone().unwrap_or_default();
                for (idx, (value, power)) in report.values.iter().zip(&powers).enumerate() {
                    text.push_str(&format!("{},{},{}\n", idx + 1, power, value));
                }
                fs::write(csv_path, text)?;
            }
            emit(
                &serde_json::to_value(&report).expect("plain data"),
                common.out.as_deref(),
            )
        }
        Command::RepValidate { system, rep, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let r = load_rep(&rep, &sys)?;
            let report = r.validate();
            let mut value = serde_json::to_value(&report).expect("plain data");
            value["association_ideal"] = if report.ok {
                io::ideal_to_json(&r.association_ideal())
            } else {
                Value::Null
            };
            value["strict"] = if report.ok { json!(r.is_strict()) } else { Value::Null };
            value["config"] =
                serde_json::to_value(ReportConfig::bare(common.tol)).expect("plain data");
            emit(&value, common.out.as_deref())?;
            if !report.ok {
                return Err(Error::InvalidRep(format!(
                    "axiom `{}` violated",
                    report.first_violation.unwrap_or_default()
                )));
            }
            Ok(())
        }
        Command::RepBuildPath { system, ideal, depth, common } => {
            let loaded = load_system(&system, common.tol)?;
            let cs = loaded.commutative.ok_or_else(|| {
                Error::InvalidInput(
                    "path representations need a commutative system file".into(),
                )
            })?;
            let j = load_ideal(&ideal, &loaded.endo)?;
            let path = build_path_rep(&cs, &j, depth, &loaded.endo)?;
            let mut report = io::path_rep_to_json(&path);
            report["association_ideal"] = io::ideal_to_json(&path.rep().association_ideal());
            report["strict"] = json!(path.rep().is_strict());
            let mut config = ReportConfig::bare(common.tol);
            config.depth = Some(depth);
            report["config"] = serde_json::to_value(config).expect("plain data");
            emit(&report, common.out.as_deref())
        }
        Command::RepNorm { system, rep, element, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let r = load_rep(&rep, &sys)?;
            let x = load_element(&element, &sys)?;
            let report = json!({
                "method": "rep-norm",
                "values": [r.norm_of(&x)],
                "config": ReportConfig::bare(common.tol),
            });
            emit(&report, common.out.as_deref())
        }
        Command::RepCompare { system, rep1, rep2, samples, common } => {
            let sys = load_system(&system, common.tol)?.endo;
            let r1 = load_rep(&rep1, &sys)?;
            let r2 = load_rep(&rep2, &sys)?;
            let sample_set = deterministic_samples(&sys, samples);
            let report = compare_reps(&r1, &r2, &sample_set, 1e-8)?;
            let mut value = serde_json::to_value(&report).expect("plain data");
            value["config"] =
                serde_json::to_value(ReportConfig::bare(common.tol)).expect("plain data");
            emit(&value, common.out.as_deref())
        }
        Command::Demo { name, tol } => demo(&name, Tol::new(tol)),
    }
}

/// Deterministic sample elements spanning a few diagonals; the same seed
/// always produces the same list, so comparisons are reproducible.
fn deterministic_samples(sys: &Endomorphism, count: usize) -> Vec<CpMatrix> {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state as f64 / u64::MAX as f64) * 2.0 - 1.0
    };
    let alg = sys.algebra().clone();
    (0..count)
        .map(|_| {
            let mut x = CpMatrix::zero(sys);
            for _ in 0..4 {
                let i = (next().abs() * 1e6) as usize % 3;
                let j = (next().abs() * 1e6) as usize % 3;
                let blocks = alg
                    .block_dims()
                    .iter()
                    .map(|&n| {
                        xprod::CMat::from_fn(n, n, |_, _| Complex::new(next(), next()))
                    })
                    .collect();
                let v = CpMatrix::project_corner(sys, i, j, &alg.element(blocks));
                if let Ok(m) = CpMatrix::from_entries(sys, [((i, j), v)]) {
                    x = x.add(&m);
                }
            }
            x
        })
        .collect()
}

/// The three-point fixture: ψ sends 1 to 2 and both 2 and 3 to 3.
fn fixture_parts(tol: Tol) -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::total(&[1, 2, 2]).expect("fixture map is valid");
    let endo = cs.compile(tol);
    (cs, endo)
}

/// The fixture element whose norm is 1 or 0 depending on the ideal:
/// coefficient e_2 at level 0 and −δ(e_2) at level 1 on the main diagonal.
fn fixture_element(endo: &Endomorphism) -> CpMatrix {
    let alg = endo.algebra().clone();
    let e2 = alg.scalar_element(&[
        Complex::new(0.0, 0.0),
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 0.0),
    ]);
    let minus_de2 = endo.apply(&e2).scale(Complex::new(-1.0, 0.0));
    CpMatrix::from_entries(endo, [((0, 0), e2), ((1, 1), minus_de2)])
        .expect("fixture satisfies the corner constraint")
}

fn demo(name: &str, tol: Tol) -> xprod::Result<()> {
    match name {
        "variety" => {
            let (_, endo) = fixture_parts(tol);
            let alg = endo.algebra().clone();
            let x = fixture_element(&endo);
            println!("system: three points, 1 -> 2, 2 -> 3, 3 -> 3 (kernel {{1}})");
            println!("element: e_2 at (0,0) and -delta(e_2) at (1,1)");
            println!();
            println!("{:<12} {:>14} {:>14}", "ideal J", "seminorm", "limit route");
            let ideals = [
                alg.zero_ideal(),
                alg.ideal([1]),
                alg.ideal([2]),
                alg.ideal([1, 2]),
            ];
            for j in &ideals {
                let s = seminorm(&x, j)?;
                let mut by_limit = 0.0;
                for k in x.diagonals() {
                    by_limit += xprod::norms::diagonal_norm_limit(&x.diagonal(k), j)?;
                }
                println!("{:<12} {:>14.10} {:>14.10}", j.to_string(), s, by_limit);
            }
            println!();
            println!("the same element generates the zero crossed product for");
            println!("J = {{2}} or {{2,3}} and a nonzero one for J = {{}} or {{3}}.");
            Ok(())
        }
        "strict-vs-associated" => {
            let (cs, endo) = fixture_parts(tol);
            let alg = endo.algebra().clone();
            let iperp = endo.kernel().complement();
            println!("kernel I = {}, largest orthogonal ideal = {}", endo.kernel(), iperp);
            println!();
            println!(
                "{:<22} {:>12} {:>10} {:>10}",
                "representation", "associated", "strict", "valid"
            );
            for (label, s_j) in [
                ("path rep at I-perp", iperp.clone()),
                ("path rep at {3}", alg.ideal([2])),
                ("path rep at {}", alg.zero_ideal()),
            ] {
                let path = build_path_rep(&cs, &s_j, 6, &endo)?;
                let report = path.validate();
                println!(
                    "{:<22} {:>12} {:>10} {:>10}",
                    label,
                    path.rep().association_ideal().to_string(),
                    path.rep().is_strict(),
                    report.ok
                );
            }
            println!();
            println!("the reps below I-perp are associated with their ideal but not");
            println!("strict; at I-perp association forces strictness in finite");
            println!("dimension, because the kernel unit splits the identity.");
            Ok(())
        }
        "fourier" => {
            let (_, endo) = fixture_parts(tol);
            let u = CpMatrix::u(&endo);
            let x = fixture_element(&endo).add(&u).add(&u.adjoint().scale(Complex::new(0.5, 0.0)));
            let terms = x.fourier_expansion();
            println!("element diagonals: {:?}", x.diagonals());
            println!();
            println!("{:>4} {:>10} {:>18}", "k", "support", "coefficient norm");
            for (k, coeff) in &terms {
                println!("{:>4} {:>10} {:>18.12}", k, coeff.nnz(), coeff.sup_entry_norm());
            }
            let back = CpMatrix::from_fourier_expansion(&endo, &terms);
            let residual = back.entry_distance(&x);
            println!();
            println!("reconstruction residual: {residual:.3e}");
            if residual > tol.get() {
                return Err(Error::InvalidInput(
                    "fourier reconstruction drifted beyond the tolerance".into(),
                ));
            }
            Ok(())
        }
        other => Err(Error::InvalidInput(format!(
            "unknown demo `{other}`; available: variety, strict-vs-associated, fourier"
        ))),
    }
}
