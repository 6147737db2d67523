//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check or suite failed, 2 usage or input error,
//! 3 numerical failure (branch cut, singular matrix, overflow).
//!
//! Tolerances default to [`SpectralTolerance::default`] and can be overridden
//! with the environment variables [`ENV_MEMBERSHIP_TOL`], [`ENV_PD_FLOOR`] and
//! [`ENV_BRANCH_GUARD`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::curves::{curve_length, ManifoldTag, SampledCurve};
use crate::error::{Error, Result};
use crate::io::{
    curve_to_json, format_float, matrix_to_json, read_curve, read_matrix, to_canonical_json,
    write_text,
};
use crate::matfun::{symmetry_residual, unitary_j_residual, RealMatrix, SpectralTolerance};
use crate::metrics::{dist_polar, dist_positive, MetricKind, PolarGeodesic, PositiveGeodesic};
use crate::sympgroup::{
    is_sp_algebra, is_symplectic, sample_positive, sample_sp_algebra, sample_symplectic,
    sample_unitary, seeded_rng, standard_j, Parity, PositiveSymplectic, SymplecticElement,
};
use crate::verify::{margins_csv, run_all, run_suite, SuiteConfig, SuiteId, VerificationReport};

pub const ENV_MEMBERSHIP_TOL: &str = "SPGEOM_MEMBERSHIP_TOL";
pub const ENV_PD_FLOOR: &str = "SPGEOM_PD_FLOOR";
pub const ENV_BRANCH_GUARD: &str = "SPGEOM_BRANCH_GUARD";

/// Grid used to measure the left-invariant length of the comparison curve in `dist`.
pub const LEFT_UPPER_BOUND_GRID: usize = 128;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spgeom", version, about = "Geometry of the symplectic group: elements, distances, geodesics and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Symplectic,
    Positive,
    Unitary,
    Algebra,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum What {
    Symplectic,
    Algebra,
    Positive,
    Unitaryj,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParityArg {
    General,
    Hermitian,
    AntiHermitian,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::General => Parity::General,
            ParityArg::Hermitian => Parity::Hermitian,
            ParityArg::AntiHermitian => Parity::AntiHermitian,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeoMetric {
    Left,
    Positive,
    Polar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LengthMetric {
    Left,
    Positive,
    Ambient,
    Polar,
}

impl From<LengthMetric> for MetricKind {
    fn from(m: LengthMetric) -> Self {
        match m {
            LengthMetric::Left => MetricKind::LeftInvariant,
            LengthMetric::Positive => MetricKind::PositiveCone,
            LengthMetric::Ambient => MetricKind::PositiveAmbient,
            LengthMetric::Polar => MetricKind::PolarProduct,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random element and write it as a JSON matrix file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Half dimension; the matrix is 2n x 2n.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Frobenius norm of the generating algebra element.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parity of algebra elements (only for --kind algebra).
        #[arg(long, value_enum, default_value = "general")]
        parity: ParityArg,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check membership of a matrix; prints the residual and exits 0 or 1.
    Check {
        #[arg(long, value_enum)]
        what: What,
        file: PathBuf,
    },
    /// Distance between two elements. The left-invariant value is an upper bound.
    Dist {
        #[arg(long, value_enum)]
        metric: GeoMetric,
        p: PathBuf,
        q: PathBuf,
    },
    /// Point at parameter t on the geodesic from P to Q, or the sampled curve with --samples.
    Geodesic {
        #[arg(long, value_enum)]
        metric: GeoMetric,
        p: PathBuf,
        q: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Write the curve sampled on this many intervals instead of one point.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Numerical length of a sampled curve.
    Length {
        #[arg(long, value_enum)]
        metric: LengthMetric,
        curve: PathBuf,
    },
    /// Run verification suites.
    Verify {
        /// Suite id S1..S13, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 2.0)]
        scale: f64,
        /// Also run the non-gating variant at scale 5.
        #[arg(long)]
        stress: bool,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the CSV margin table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Document written by `verify --json`.
#[derive(Debug, Serialize)]
pub struct ReportFile<'a> {
    pub all_passed: bool,
    pub reports: &'a [VerificationReport],
}

fn env_f64(name: &str, default: f64) -> Result<f64> {
    match std::env::var(name) {
        Ok(text) => text
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("{name}='{text}' is not a number"))),
        Err(std::env::VarError::NotPresent) => Ok(default),
        Err(e) => Err(Error::InvalidParameter(format!("{name}: {e}"))),
    }
}

/// Default tolerances with environment overrides applied.
pub fn tolerance_from_env() -> Result<SpectralTolerance> {
    let d = SpectralTolerance::default();
    SpectralTolerance::new(
        env_f64(ENV_MEMBERSHIP_TOL, d.membership_tol)?,
        env_f64(ENV_PD_FLOOR, d.pd_floor)?,
        env_f64(ENV_BRANCH_GUARD, d.branch_guard)?,
    )
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn symplectic_input(path: &Path, tol: SpectralTolerance) -> Result<SymplecticElement> {
    SymplecticElement::new(read_matrix(path)?, tol).map_err(|e| annotate(e, path))
}

fn positive_input(path: &Path, tol: SpectralTolerance) -> Result<PositiveSymplectic> {
    PositiveSymplectic::new(read_matrix(path)?, tol).map_err(|e| annotate(e, path))
}

fn annotate(e: Error, path: &Path) -> Error {
    if e.is_numeric() {
        e
    } else {
        Error::InvalidParameter(format!("{}: {e}", path.display()))
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn check(what: What, m: &RealMatrix, tol: &SpectralTolerance, out: &mut dyn Write) -> Result<bool> {
    let n = crate::matfun::check_real_matrix(m)?;
    let j = standard_j(n)?;
    let pass = match what {
        What::Symplectic => {
            let c = is_symplectic(m, &j, tol)?;
            let min_sv = m.clone().singular_values().min();
            let pass = c.pass && min_sv >= tol.pd_floor;
            writeln!(
                out,
                "residual {} threshold {} min_singular_value {} {}",
                format_float(c.residual),
                format_float(c.threshold),
                format_float(min_sv),
                pass_word(pass)
            )?;
            pass
        }
        What::Algebra => {
            let c = is_sp_algebra(m, &j, tol)?;
            writeln!(
                out,
                "residual {} threshold {} parity {} {}",
                format_float(c.residual),
                format_float(c.threshold),
                c.classification().as_str(),
                pass_word(c.pass)
            )?;
            c.pass
        }
        What::Positive => {
            let c = is_symplectic(m, &j, tol)?;
            let sym = symmetry_residual(m);
            let sym_ok = sym <= tol.linear_threshold(m.norm());
            let min_eig = crate::matfun::symmetrize(m).symmetric_eigenvalues().min();
            let pass = c.pass && sym_ok && min_eig >= tol.pd_floor;
            writeln!(
                out,
                "residual {} threshold {} symmetry_residual {} min_eigenvalue {} {}",
                format_float(c.residual),
                format_float(c.threshold),
                format_float(sym),
                format_float(min_eig),
                pass_word(pass)
            )?;
            pass
        }
        What::Unitaryj => {
            let residual = unitary_j_residual(m)?;
            let threshold = tol.quadratic_threshold(m.norm());
            let pass = residual <= threshold;
            writeln!(
                out,
                "residual {} threshold {} {}",
                format_float(residual),
                format_float(threshold),
                pass_word(pass)
            )?;
            pass
        }
    };
    Ok(pass)
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let tol = tolerance_from_env()?;
    match cli.command {
        Command::Gen {
            kind,
            n,
            scale,
            seed,
            parity,
            output,
        } => {
            let mut rng = seeded_rng(seed);
            let m = match kind {
                Kind::Symplectic => sample_symplectic(&mut rng, n, scale, tol)?.into_matrix(),
                Kind::Positive => sample_positive(&mut rng, n, scale, tol)?.into_matrix(),
                Kind::Unitary => sample_unitary(&mut rng, n, scale, tol)?.into_matrix(),
                Kind::Algebra => sample_sp_algebra(&mut rng, n, parity.into(), scale)?.into_matrix(),
            };
            emit(out, output.as_deref(), &matrix_to_json(&m))?;
            Ok(EXIT_OK)
        }
        Command::Check { what, file } => {
            let m = read_matrix(&file)?;
            Ok(if check(what, &m, &tol, out)? { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Dist { metric, p, q } => {
            match metric {
                GeoMetric::Positive => {
                    let d = dist_positive(&positive_input(&p, tol)?, &positive_input(&q, tol)?)?;
                    writeln!(out, "distance {}", format_float(d))?;
                }
                GeoMetric::Polar => {
                    let d = dist_polar(&symplectic_input(&p, tol)?, &symplectic_input(&q, tol)?)?;
                    writeln!(out, "distance {}", format_float(d))?;
                }
                GeoMetric::Left => {
                    let geodesic = PolarGeodesic::new(&symplectic_input(&p, tol)?, &symplectic_input(&q, tol)?)?;
                    let curve = SampledCurve::from_fn(LEFT_UPPER_BOUND_GRID, ManifoldTag::Symplectic, tol, |t| {
                        geodesic.matrix_at(t)
                    })?;
                    let bound = curve_length(&curve, MetricKind::LeftInvariant)?;
                    writeln!(out, "upper_bound {}", format_float(bound))?;
                    writeln!(
                        err,
                        "note: left-invariant length of the polar geodesic on {LEFT_UPPER_BOUND_GRID} intervals; an upper bound for the distance"
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Geodesic {
            metric,
            p,
            q,
            t,
            samples,
            output,
        } => {
            if !t.is_finite() {
                return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
            }
            let (tag, eval): (ManifoldTag, Box<dyn Fn(f64) -> Result<RealMatrix>>) = match metric {
                GeoMetric::Positive => {
                    let g = PositiveGeodesic::new(&positive_input(&p, tol)?, &positive_input(&q, tol)?)?;
                    (ManifoldTag::PositiveSymplectic, Box::new(move |s| g.matrix_at(s)))
                }
                GeoMetric::Polar | GeoMetric::Left => {
                    if matches!(metric, GeoMetric::Left) {
                        writeln!(
                            err,
                            "note: no closed-form left-invariant geodesic joins two points; evaluating the polar geodesic"
                        )?;
                    }
                    let g = PolarGeodesic::new(&symplectic_input(&p, tol)?, &symplectic_input(&q, tol)?)?;
                    (ManifoldTag::Symplectic, Box::new(move |s| g.matrix_at(s)))
                }
            };
            let text = match samples {
                Some(intervals) => curve_to_json(&SampledCurve::from_fn(intervals, tag, tol, eval)?),
                None => matrix_to_json(&eval(t)?),
            };
            emit(out, output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Length { metric, curve } => {
            let c = read_curve(&curve, tol)?;
            writeln!(out, "length {}", format_float(curve_length(&c, metric.into())?))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            n,
            trials,
            seed,
            grid,
            scale,
            stress,
            json,
            csv,
        } => {
            let base = SuiteConfig {
                n,
                trials,
                seed,
                grid,
                scale,
                tol,
                stress,
                ..SuiteConfig::new(SuiteId::S1)
            };
            let reports = if suite.eq_ignore_ascii_case("all") {
                run_all(&base)?
            } else {
                vec![run_suite(&SuiteConfig {
                    suite: suite.parse()?,
                    ..base
                })?]
            };
            for r in &reports {
                writeln!(out, "{}", r.summary_line())?;
                if let Some(s) = &r.stress {
                    writeln!(
                        out,
                        "  stress (scale {}, not gating): {}/{} pass",
                        s.scale,
                        s.passed,
                        s.passed + s.failed
                    )?;
                }
            }
            let passed: usize = reports.iter().map(|r| r.passed).sum();
            let total: usize = reports.iter().map(|r| r.trials.len()).sum();
            let all_passed = reports.iter().all(VerificationReport::all_passed);
            writeln!(out, "total {passed}/{total} pass")?;
            if let Some(path) = json {
                write_text(
                    &path,
                    &to_canonical_json(&ReportFile {
                        all_passed,
                        reports: &reports,
                    }),
                )?;
            }
            if let Some(path) = csv {
                write_text(&path, &margins_csv(&reports)?)?;
            }
            Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["spgeom"];
        argv.extend_from_slice(args);
        let code = cli_main(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn value(line: &str, key: &str) -> f64 {
        let mut words = line.split_whitespace();
        while let Some(w) = words.next() {
            if w == key {
                return words.next().unwrap().parse().unwrap();
            }
        }
        panic!("{key} not in {line}")
    }

    #[test]
    fn check_identity_and_distance() {
        let dir = tempfile::tempdir().unwrap();
        let id = dir.path().join("I.json");
        let q = dir.path().join("Q.json");
        std::fs::write(&id, matrix_to_json(&RealMatrix::identity(2, 2))).unwrap();
        let e = std::f64::consts::E;
        let (code, out, _) = call(&["check", "--what", "symplectic", id.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(value(&out, "residual"), 0.0);
        std::fs::write(&q, matrix_to_json(&RealMatrix::from_row_slice(2, 2, &[e, 0.0, 0.0, 1.0 / e]))).unwrap();
        let (code, out, _) = call(&["dist", "--metric", "positive", id.to_str().unwrap(), q.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!((value(&out, "distance") - std::f64::consts::SQRT_2).abs() < 1e-8);
        let (code, out, err) = call(&["dist", "--metric", "left", id.to_str().unwrap(), q.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(value(&out, "upper_bound") >= std::f64::consts::SQRT_2 - 1e-6);
        assert!(err.contains("upper bound"));
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"dim": 2, "data": [1, 2, 3]}"#).unwrap();
        let (code, _, err) = call(&["check", "--what", "symplectic", bad.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("'data'"));
        let twice = dir.path().join("twice.json");
        std::fs::write(&twice, matrix_to_json(&(RealMatrix::identity(2, 2) * 2.0))).unwrap();
        let (code, out, _) = call(&["check", "--what", "symplectic", twice.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(out.contains("fail"));
        let (code, _, _) = call(&["verify", "--suite", "S99"]);
        assert_eq!(code, 2);
        let (code, _, _) = call(&["frobnicate"]);
        assert_eq!(code, 2);
        let minus = dir.path().join("minus.json");
        std::fs::write(&minus, matrix_to_json(&(-RealMatrix::identity(2, 2)))).unwrap();
        let id = dir.path().join("id.json");
        std::fs::write(&id, matrix_to_json(&RealMatrix::identity(2, 2))).unwrap();
        let (code, _, err) = call(&["dist", "--metric", "polar", id.to_str().unwrap(), minus.to_str().unwrap()]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn gen_then_check_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        for (kind, what) in [
            ("symplectic", "symplectic"),
            ("positive", "positive"),
            ("unitary", "unitaryj"),
            ("algebra", "algebra"),
        ] {
            for seed in 0..5 {
                let path = dir.path().join(format!("{kind}{seed}.json"));
                let seed = seed.to_string();
                let (code, _, err) = call(&["gen", "--kind", kind, "--n", "3", "--scale", "2", "--seed", &seed, "-o", path.to_str().unwrap()]);
                assert_eq!(code, 0, "{err}");
                let (code, out, _) = call(&["check", "--what", what, path.to_str().unwrap()]);
                assert_eq!(code, 0, "{kind}: {out}");
            }
        }
    }

    #[test]
    fn geodesic_and_length() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.json");
        let q = dir.path().join("q.json");
        let curve = dir.path().join("curve.json");
        call(&["gen", "--kind", "positive", "--seed", "1", "-o", p.to_str().unwrap()]);
        call(&["gen", "--kind", "positive", "--seed", "2", "-o", q.to_str().unwrap()]);
        let (code, out, _) = call(&["geodesic", "--metric", "positive", p.to_str().unwrap(), q.to_str().unwrap(), "--t", "0"]);
        assert_eq!(code, 0);
        let start = crate::io::parse_matrix_json(&out).unwrap();
        assert!((start - read_matrix(&p).unwrap()).norm() < 1e-12);
        let (code, _, _) = call(&[
            "geodesic", "--metric", "positive", p.to_str().unwrap(), q.to_str().unwrap(), "--samples", "64", "-o", curve.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let (code, out, _) = call(&["length", "--metric", "positive", curve.to_str().unwrap()]);
        assert_eq!(code, 0);
        let (_, d, _) = call(&["dist", "--metric", "positive", p.to_str().unwrap(), q.to_str().unwrap()]);
        assert!((value(&out, "length") - value(&d, "distance")).abs() < 1e-4);
    }

    #[test]
    fn verify_writes_reports() {
        let dir = tempfile::tempdir().unwrap();
        let json = dir.path().join("r.json");
        let csv = dir.path().join("r.csv");
        let (code, out, _) = call(&[
            "verify", "--suite", "S5", "--n", "2", "--trials", "20", "--seed", "42", "--json", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("20/20 pass"));
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(doc["all_passed"], true);
        assert_eq!(doc["reports"][0]["suite"], "S5");
        assert_eq!(doc["reports"][0]["trials"].as_array().unwrap().len(), 20);
        assert!(std::fs::read_to_string(&csv).unwrap().starts_with("suite,trial,seed,pass,check,value,margin"));
    }
}
