//! Command-line front end for `cframe`.
//!
//! Exit codes: 0 when the command succeeds and the tested property holds,
//! 1 when the property fails, 2 for malformed input, 3 when a randomized
//! construction runs out of capacity or draws.

pub mod family_file;

use std::io::Write;
use std::path::{Path, PathBuf};

use cframe::analysis::{analyze, frame_bounds, parseval_deviation, quotient, QuotientForm, Tolerances, DEFAULT_PARSEVAL_TOL};
use cframe::extended::extension_equivalence_check;
use cframe::generators::{circle_frame, dirichlet_example, dirichlet_is_degenerate, mercedes_benz, random_family};
use cframe::topology::{certify_path, connect, density_perturb, perturbation_auxiliary, PathMode};
use cframe::{Family, Field, FrameError, C};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

pub use family_file::{format_family, parse_family, read_family, write_family, FileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cframe", version, about = "Frame diagnostics for weighted families in R^n and C^n")]
pub struct Cli {
    /// Report style.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Frame,
    Parseval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Direct,
    Trace,
    Synth,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    R,
    C,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full diagnostic: energy, optimal bounds, det U, frame and Parseval status.
    /// Exits 0 for a frame, 1 otherwise.
    Analyze {
        file: PathBuf,
        /// Frame tolerance on lambda_min (default 1e-10 * max(1, lambda_max)).
        #[arg(long)]
        tol_frame: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_PARSEVAL_TOL)]
        tol_parseval: f64,
    },
    /// Optimal frame bounds A = lambda_min(U), B = lambda_max(U).
    Bounds { file: PathBuf },
    /// Exits 0 when max |U - I| <= tol, 1 otherwise.
    CheckParseval {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PARSEVAL_TOL)]
        tol: f64,
    },
    /// Frame quotient N(v) for a comma-separated vector (entries like 1, -0.5, 2+3i).
    Quotient {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long, value_enum, default_value_t = FormArg::All)]
        form: FormArg,
    },
    /// Randomized check of the extended frame inequality and its reductions.
    ExtendCheck {
        file: PathBuf,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Builds and certifies a path between two families through an auxiliary family.
    Path {
        u_file: PathBuf,
        v_file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 21)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a frame within distance eps of the input family.
    Perturb {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Writes a reference family.
    Generate {
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
        #[command(subcommand)]
        kind: GenerateKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// (e^{2 pi i a n} / n, e^{2 pi i b n} / n), n = 1..terms.
    Dirichlet {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        terms: usize,
    },
    /// Equispaced quadrature of the unit circle.
    Circle {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Three unit vectors at 120 degrees, unit weights.
    Mercedes {
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Unit weights, standard normal entries.
    Random {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FieldArg::R)]
        field: FieldArg,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{0}")]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write report: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Frame(FrameError::Capacity { .. } | FrameError::Generation(_)) => EXIT_CAPACITY,
            _ => EXIT_INPUT,
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out` and diagnostics to `err`. Returns the exit
/// code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Reporter<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Reporter<'_> {
    fn emit<R: Serialize>(&mut self, structured: &R, plain: impl FnOnce() -> String) -> Result<(), CliError> {
        match self.format {
            Format::Plain => write!(self.out, "{}", plain())?,
            Format::Structured => {
                let s = serde_json::to_string_pretty(structured).expect("report serializes");
                writeln!(self.out, "{s}")?
            }
        }
        Ok(())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut rep = Reporter { format: cli.format, out };
    match &cli.command {
        Command::Analyze {
            file,
            tol_frame,
            tol_parseval,
        } => {
            let fam = read_family(file)?;
            check_positive("--tol-parseval", *tol_parseval)?;
            if let Some(t) = tol_frame {
                check_positive("--tol-frame", *t)?;
            }
            let tol = Tolerances {
                frame: *tol_frame,
                parseval: *tol_parseval,
            };
            let v = analyze(&fam, &tol)?;
            let label = fam.meta().label.clone();
            rep.emit(&json!({ "file": file, "label": label, "verdict": v }), || {
                let mut s = String::new();
                if let Some(l) = &label {
                    s += &format!("label: {l}\n");
                }
                s += &format!("points: {}  n: {}  field: {}\n", v.points, v.dim, field_name(fam.field()));
                s += &format!("energy: {}\n", v.energy);
                if let Some(t) = v.tail_bound {
                    s += &format!("tail_bound: {t}\n");
                }
                s += &format!("A={} B={}\n", v.lower_bound, v.upper_bound);
                s += &format!("det_U: {}\n", v.det_u);
                s += &format!("bessel: {}\n", yes_no(v.is_bessel));
                s += &format!("frame: {} (lambda_min > tol_frame = {:e})\n", yes_no(v.is_frame), v.tol_frame);
                s += &format!(
                    "parseval: {} (max |U - I| = {:e}, tol_parseval = {:e})\n",
                    yes_no(v.is_parseval),
                    v.parseval_deviation,
                    v.tol_parseval
                );
                if let Some(f2) = v.f2_sufficient {
                    s += &format!(
                        "f2_sufficient: {} (guaranteed_A = {})\n",
                        if f2.holds { "holds" } else { "fails" },
                        f2.guaranteed_lower
                    );
                }
                s
            })?;
            Ok(if v.is_frame { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }

        Command::Bounds { file } => {
            let fam = read_family(file)?;
            let b = frame_bounds(&fam)?;
            rep.emit(&json!({ "file": file, "A": b.lower, "B": b.upper }), || {
                format!("A={} B={}\n", b.lower, b.upper)
            })?;
            Ok(EXIT_OK)
        }

        Command::CheckParseval { file, tol } => {
            check_positive("--tol", *tol)?;
            let fam = read_family(file)?;
            let dev = parseval_deviation(&fam);
            let holds = dev <= *tol;
            rep.emit(
                &json!({ "file": file, "is_parseval": holds, "max_deviation": dev, "tol": tol }),
                || format!("parseval: {} (max |U - I| = {dev:e}, tol = {tol:e})\n", yes_no(holds)),
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }

        Command::Quotient { file, vector, form } => {
            let fam = read_family(file)?;
            let v = parse_vector(vector)?;
            if v.len() != fam.dim() {
                return Err(CliError::Usage(format!(
                    "vector has {} entries, family has n = {}",
                    v.len(),
                    fam.dim()
                )));
            }
            if v.iter().all(|z| *z == C::new(0.0, 0.0)) {
                return Err(CliError::Usage("zero test vector: quotient undefined".into()));
            }
            let forms: Vec<QuotientForm> = match form {
                FormArg::Direct => vec![QuotientForm::Direct],
                FormArg::Trace => vec![QuotientForm::Trace],
                FormArg::Synth => vec![QuotientForm::Synthesis],
                FormArg::All => QuotientForm::ALL.to_vec(),
            };
            let values = forms
                .iter()
                .map(|&f| quotient(&v, &fam, f).map(|q| (f, q)))
                .collect::<Result<Vec<_>, _>>()?;
            let structured: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(f, q)| (format!("{f:?}").to_lowercase(), json!(q)))
                .collect();
            rep.emit(&json!({ "file": file, "quotient": structured }), || {
                values
                    .iter()
                    .map(|(f, q)| format!("N_{}={q}\n", format!("{f:?}").to_lowercase()))
                    .collect()
            })?;
            Ok(EXIT_OK)
        }

        Command::ExtendCheck {
            file,
            blocks,
            trials,
            seed,
        } => {
            let fam = read_family(file)?;
            let r = extension_equivalence_check(&fam, *trials, *blocks, *seed)?;
            rep.emit(&r, || {
                format!(
                    "blocks: {} trials: {}\nA={} B={} frame: {}\n\
                     max lower violation: {:e}\nmax upper violation: {:e}\n\
                     max quadratic-form gap: {:e}\nmax delta-embedding gap: {:e}\n\
                     max indicator-embedding gap: {:e}\nbound_tol: {:e} reduction_tol: {:e}\nresult: {}\n",
                    r.blocks,
                    r.trials,
                    r.lower_bound,
                    r.upper_bound,
                    yes_no(r.is_frame),
                    r.max_lower_violation,
                    r.max_upper_violation,
                    r.max_quadratic_form_gap,
                    r.max_delta_gap,
                    r.max_indicator_gap,
                    r.bound_tol,
                    r.reduction_tol,
                    if r.passed { "pass" } else { "fail" }
                )
            })?;
            Ok(if r.passed { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }

        Command::Path {
            u_file,
            v_file,
            mode,
            samples,
            seed,
        } => {
            let u = read_family(u_file)?;
            let v = read_family(v_file)?;
            let mode = match mode {
                ModeArg::Frame => PathMode::FramePolygonal,
                ModeArg::Parseval => PathMode::ParsevalNormalized,
            };
            let path = connect(&u, &v, mode, *seed)?;
            let cert = certify_path(&path, *samples)?;
            rep.emit(&cert, || {
                let mut s = format!("mode: {:?}\nsamples per leg: {}\n", cert.mode, cert.samples_per_leg);
                if let Some(m) = cert.min_lower_bound {
                    s += &format!("min lambda_min: {m:e}\n");
                }
                if let Some(m) = cert.max_parseval_deviation {
                    s += &format!("max |U - I|: {m:e} (tol {:e})\n", cframe::topology::PARSEVAL_PATH_TOL);
                }
                if let Some(f) = &cert.first_failure {
                    s += &format!("first failure: leg {:?} t={} value={:e} tol={:e}\n", f.leg, f.t, f.value, f.tol);
                }
                s += &format!("result: {}\n", if cert.passed { "pass" } else { "fail" });
                s
            })?;
            Ok(if cert.passed { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }

        Command::Perturb {
            file,
            eps,
            seed,
            output,
        } => {
            let u = read_family(file)?;
            if !(*eps > 0.0 && eps.is_finite()) {
                return Err(CliError::Usage("--eps must be positive".into()));
            }
            let aux = perturbation_auxiliary(&u, *seed)?;
            let p = density_perturb(&u, &aux, *eps, seed.wrapping_add(1))?;
            write_family(&p.family, output)?;
            rep.emit(
                &json!({
                    "output": output, "t": p.t, "distance": p.distance, "eps": eps,
                    "lower_bound": p.lower_bound, "tol_frame": p.frame_tol,
                }),
                || {
                    format!(
                        "wrote {}\nt={} distance={:e} (eps {:e})\nA={} (tol_frame {:e})\n",
                        output.display(),
                        p.t,
                        p.distance,
                        eps,
                        p.lower_bound,
                        p.frame_tol
                    )
                },
            )?;
            Ok(EXIT_OK)
        }

        Command::Generate { output, kind } => {
            let output = output
                .as_deref()
                .ok_or_else(|| CliError::Usage("generate requires -o OUT".into()))?;
            let fam = generate(kind, err)?;
            write_family(&fam, output)?;
            report_written(&mut rep, output, &fam)?;
            Ok(EXIT_OK)
        }
    }
}

fn generate(kind: &GenerateKind, err: &mut dyn Write) -> Result<Family, CliError> {
    Ok(match kind {
        GenerateKind::Dirichlet { a, b, terms } => {
            if dirichlet_is_degenerate(*a, *b) {
                writeln!(
                    err,
                    "warning: a - b = {} is an integer; the components are proportional and the family is not a frame",
                    a - b
                )?;
            }
            dirichlet_example(*a, *b, *terms)?
        }
        GenerateKind::Circle { nodes, scale } => circle_frame(*nodes, *scale)?,
        GenerateKind::Mercedes { scale } => {
            if !scale.is_finite() {
                return Err(CliError::Usage("--scale must be finite".into()));
            }
            mercedes_benz(*scale)
        }
        GenerateKind::Random {
            points,
            dim,
            seed,
            field,
        } => {
            let field = match field {
                FieldArg::R => Field::Real,
                FieldArg::C => Field::Complex,
            };
            random_family(*points, *dim, field, *seed)?
        }
    })
}

fn report_written(rep: &mut Reporter<'_>, output: &Path, fam: &Family) -> Result<(), CliError> {
    let label = fam.meta().label.clone();
    rep.emit(
        &json!({ "output": output, "points": fam.len(), "n": fam.dim(), "label": label }),
        || format!("wrote {} ({} points, n = {})\n", output.display(), fam.len(), fam.dim()),
    )
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::Real => "R",
        Field::Complex => "C",
    }
}

fn check_positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {x}")))
    }
}

/// Parses `1,-0.5,2+3i` into a complex vector.
pub fn parse_vector(s: &str) -> Result<Vec<C<f64>>, CliError> {
    s.split(',')
        .enumerate()
        .map(|(k, part)| {
            let part = part.trim();
            let z: C<f64> = part
                .parse()
                .map_err(|_| CliError::Usage(format!("vector entry {k}: cannot parse {part:?}")))?;
            if z.re.is_finite() && z.im.is_finite() {
                Ok(z)
            } else {
                Err(CliError::Usage(format!("vector entry {k} is not finite")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_parsing() {
        let v = parse_vector("1, -0.5,2+3i").unwrap();
        assert_eq!(v, vec![C::new(1.0, 0.0), C::new(-0.5, 0.0), C::new(2.0, 3.0)]);
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("inf,0").is_err());
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::Frame(FrameError::Capacity { required: 3, available: 2 }).exit_code(), 3);
        assert_eq!(CliError::Frame(FrameError::Generation("x".into())).exit_code(), 3);
        assert_eq!(CliError::Frame(FrameError::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    }
}
