//! Randomized verification suites.
//!
//! Each suite draws independent random instances, evaluates one or more
//! inequalities or identities and records a signed margin per check
//! (`bound - value` for upper bounds, `value - bound` for lower bounds), so a
//! trial passes when all of its margins are non-negative. Trial `i` draws from
//! `child_seed(seed, i)`; trials run in parallel and are collected in index
//! order, so a report is a pure function of its configuration.
//!
//! | suite | checks |
//! |-------|--------|
//! | S1 | adjoint and polar factors of a symplectic matrix are symplectic |
//! | S2 | closure of the group and the algebra under the basic operations |
//! | S3 | left-invariant geodesics have parallel velocity, with second-order convergence |
//! | S4 | positive-cone geodesics are shorter than bump competitors |
//! | S5 | exponential metric increasing inequality |
//! | S6 | idempotence, adjoint and range of the projection `Pi_g` |
//! | S7 | `||a - b||_2` bounds the ambient length of paths in the positive part |
//! | S8 | polar geodesics are shorter than bump competitors; distance formula |
//! | S9 | comparison of the left-invariant and polar distances |
//! | S10 | equivalence of the trace distance and the chordal distance on unitaries |
//! | S11 | left geodesics with normal speed are one-parameter groups |
//! | S12 | `||Exp_1(v) - 1||_2 <= e^{3 eps} eps` for `||v||_2 = eps` |
//! | S13 | transporter and section of the congruence action |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{format_float, MatrixFile};
use crate::matfun::{RealMatrix, SpectralTolerance};
use crate::sympgroup::{child_seed, seeded_rng, MembershipCheck};

mod suites;

/// Competitors per trial in the minimality suites.
pub const COMPETITORS: usize = 32;
/// Competitors per trial in the ambient suite (the geodesic plus bumps).
pub const AMBIENT_COMPETITORS: usize = 5;
/// Bump amplitude for competitors.
pub const COMPETITOR_AMPLITUDE: f64 = 0.3;
/// Slack absorbing quadrature bias in length comparisons.
pub const LENGTH_SLACK: f64 = 1e-6;
/// Scale of the non-gating stress variant.
pub const STRESS_SCALE: f64 = 5.0;
/// Values of `eps` cycled through by S12.
pub const CAUCHY_EPSILONS: [f64; 4] = [0.05, 0.1, 0.25, 0.5];
/// Parameters at which S11 compares the two curves.
pub const NORMAL_TIMES: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    S10,
    S11,
    S12,
    S13,
}

impl SuiteId {
    pub const ALL: [SuiteId; 13] = [
        SuiteId::S1,
        SuiteId::S2,
        SuiteId::S3,
        SuiteId::S4,
        SuiteId::S5,
        SuiteId::S6,
        SuiteId::S7,
        SuiteId::S8,
        SuiteId::S9,
        SuiteId::S10,
        SuiteId::S11,
        SuiteId::S12,
        SuiteId::S13,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteId::S1 => "S1",
            SuiteId::S2 => "S2",
            SuiteId::S3 => "S3",
            SuiteId::S4 => "S4",
            SuiteId::S5 => "S5",
            SuiteId::S6 => "S6",
            SuiteId::S7 => "S7",
            SuiteId::S8 => "S8",
            SuiteId::S9 => "S9",
            SuiteId::S10 => "S10",
            SuiteId::S11 => "S11",
            SuiteId::S12 => "S12",
            SuiteId::S13 => "S13",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            SuiteId::S1 => "adjoint and polar factors stay symplectic",
            SuiteId::S2 => "symplectic inverse and closure",
            SuiteId::S3 => "left-invariant geodesics are parallel",
            SuiteId::S4 => "positive-cone geodesics are minimal",
            SuiteId::S5 => "exponential metric increasing inequality",
            SuiteId::S6 => "projection onto the tangent space of the positive part",
            SuiteId::S7 => "ambient lower bound",
            SuiteId::S8 => "polar geodesics are minimal",
            SuiteId::S9 => "comparison of left-invariant and polar distances",
            SuiteId::S10 => "unitary metric equivalence",
            SuiteId::S11 => "normal-speed geodesics are one-parameter groups",
            SuiteId::S12 => "Cauchy-transfer bound",
            SuiteId::S13 => "transitivity of the congruence action",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteId,
    /// Half dimension `n`; matrices are `2n x 2n`.
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Number of grid intervals for sampled curves.
    pub grid: usize,
    /// Upper bound on the Frobenius norm of the random algebra elements.
    pub scale: f64,
    pub tol: SpectralTolerance,
    /// Also run the non-gating variant at [`STRESS_SCALE`].
    pub stress: bool,
}

impl SuiteConfig {
    pub fn new(suite: SuiteId) -> Self {
        Self {
            suite,
            n: 2,
            trials: 100,
            seed: 0,
            grid: 64,
            scale: 2.0,
            tol: SpectralTolerance::default(),
            stress: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.n) {
            return Err(Error::InvalidParameter(format!("n must be in 1..=6, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.grid < crate::curves::MIN_INTERVALS {
            return Err(Error::InvalidParameter(format!(
                "grid must be >= {}, got {}",
                crate::curves::MIN_INTERVALS,
                self.grid
            )));
        }
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale must be finite and non-negative, got {}",
                self.scale
            )));
        }
        self.tol.validate()
    }
}

/// Measurements of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    /// Seed of the trial's random stream, `child_seed(config.seed, index)`.
    pub seed: u64,
    pub pass: bool,
    /// Smallest signed margin of the trial; `null` when the trial errored.
    pub margin: Option<f64>,
    pub quantities: BTreeMap<String, f64>,
    pub margins: BTreeMap<String, f64>,
    pub error: Option<String>,
}

/// Inputs of a failing trial, sufficient to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDump {
    pub index: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub matrices: BTreeMap<String, MatrixFile>,
}

/// Outcome of the non-gating variant at a larger scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressSummary {
    pub scale: f64,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: Option<f64>,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: SuiteId,
    pub title: String,
    pub config: SuiteConfig,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: Option<f64>,
    pub worst_trial: Option<usize>,
    pub trials: Vec<TrialRecord>,
    pub failures: Vec<FailureDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stress: Option<StressSummary>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Largest value of `quantity` over the trials that recorded it.
    pub fn max_quantity(&self, quantity: &str) -> Option<f64> {
        self.quantities(quantity).reduce(f64::max)
    }

    pub fn min_quantity(&self, quantity: &str) -> Option<f64> {
        self.quantities(quantity).reduce(f64::min)
    }

    fn quantities<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = f64> + 'a {
        self.trials.iter().filter_map(move |t| t.quantities.get(quantity).copied())
    }

    pub fn summary_line(&self) -> String {
        let worst = self.worst_margin.map_or_else(|| "n/a".to_string(), format_float);
        format!(
            "{} {}/{} pass, worst margin {} ({})",
            self.suite,
            self.passed,
            self.trials.len(),
            worst,
            self.title
        )
    }
}

/// Collects the quantities and margins of a trial as it runs.
#[derive(Debug, Default)]
pub(crate) struct Trial {
    quantities: BTreeMap<String, f64>,
    margins: BTreeMap<String, f64>,
    matrices: BTreeMap<String, RealMatrix>,
}

impl Trial {
    pub(crate) fn record(&mut self, name: &str, value: f64) {
        self.quantities.insert(name.to_string(), value);
    }

    /// Requires `value <= bound`.
    pub(crate) fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value);
        self.margins.insert(name.to_string(), bound - value);
    }

    /// Requires `value >= bound`.
    pub(crate) fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value);
        self.margins.insert(name.to_string(), value - bound);
    }

    pub(crate) fn membership(&mut self, name: &str, check: MembershipCheck) {
        self.at_most(name, check.residual, check.threshold);
    }

    pub(crate) fn input(&mut self, name: &str, m: &RealMatrix) {
        self.matrices.insert(name.to_string(), m.clone());
    }
}

fn run_trial(config: &SuiteConfig, index: usize) -> (TrialRecord, Option<FailureDump>) {
    let seed = child_seed(config.seed, index as u64);
    let mut rng = seeded_rng(seed);
    let mut trial = Trial::default();
    let outcome = suites::run(config, index, &mut rng, &mut trial);
    let error = outcome.err().map(|e| e.to_string());
    let margin = if error.is_some() {
        None
    } else {
        trial.margins.values().copied().reduce(f64::min)
    };
    let pass = error.is_none() && trial.margins.values().all(|m| *m >= 0.0);
    let dump = (!pass).then(|| FailureDump {
        index,
        seed,
        error: error.clone(),
        matrices: trial
            .matrices
            .iter()
            .map(|(k, m)| (k.clone(), MatrixFile::from_matrix(m)))
            .collect(),
    });
    let record = TrialRecord {
        index,
        seed,
        pass,
        margin,
        quantities: trial.quantities,
        margins: trial.margins,
        error,
    };
    (record, dump)
}

fn execute(config: &SuiteConfig) -> (Vec<TrialRecord>, Vec<FailureDump>) {
    let results: Vec<_> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (record, dump) in results {
        records.push(record);
        failures.extend(dump);
    }
    (records, failures)
}

fn worst(records: &[TrialRecord]) -> (Option<f64>, Option<usize>) {
    let mut best: Option<(f64, usize)> = None;
    for r in records {
        if let Some(m) = r.margin {
            if best.is_none_or(|(b, _)| m < b || m.is_nan()) {
                best = Some((m, r.index));
            }
        }
    }
    (best.map(|b| b.0), best.map(|b| b.1))
}

/// Runs one suite. Errors inside a trial are recorded as trial failures.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let (trials, failures) = execute(config);
    let passed = trials.iter().filter(|t| t.pass).count();
    let (worst_margin, worst_trial) = worst(&trials);
    let stress = if config.stress {
        let stressed = SuiteConfig {
            scale: STRESS_SCALE,
            stress: false,
            ..*config
        };
        let (records, _) = execute(&stressed);
        let passed = records.iter().filter(|t| t.pass).count();
        Some(StressSummary {
            scale: STRESS_SCALE,
            passed,
            failed: records.len() - passed,
            worst_margin: worst(&records).0,
            errors: records.iter().filter(|t| t.error.is_some()).count(),
        })
    } else {
        None
    };
    Ok(VerificationReport {
        suite: config.suite,
        title: config.suite.title().to_string(),
        config: *config,
        passed,
        failed: trials.len() - passed,
        worst_margin,
        worst_trial,
        trials,
        failures,
        stress,
    })
}

/// Runs every suite with the shared settings of `config`.
pub fn run_all(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    SuiteId::ALL
        .iter()
        .map(|&suite| run_suite(&SuiteConfig { suite, ..*config }))
        .collect()
}

/// Long-format margin table: one row per (trial, check).
pub fn margins_csv(reports: &[VerificationReport]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_error = |e: csv::Error| Error::Io(e.to_string());
    writer
        .write_record(["suite", "trial", "seed", "pass", "check", "value", "margin"])
        .map_err(io_error)?;
    for report in reports {
        for t in &report.trials {
            for (check, margin) in &t.margins {
                let value = t.quantities.get(check).copied().unwrap_or(f64::NAN);
                writer
                    .write_record([
                        report.suite.as_str(),
                        &t.index.to_string(),
                        &t.seed.to_string(),
                        if t.pass { "true" } else { "false" },
                        check,
                        &format_float(value),
                        &format_float(*margin),
                    ])
                    .map_err(io_error)?;
            }
            if let Some(e) = &t.error {
                writer
                    .write_record([
                        report.suite.as_str(),
                        &t.index.to_string(),
                        &t.seed.to_string(),
                        "false",
                        &format!("error: {e}"),
                        "NaN",
                        "NaN",
                    ])
                    .map_err(io_error)?;
            }
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
