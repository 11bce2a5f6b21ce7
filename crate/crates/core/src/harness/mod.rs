//! Command drivers behind the `bosonsim` binary, plus the statistics and
//! benchmarks they rely on.

mod bench;
mod matrix_io;
mod stats;

pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow};
pub use matrix_io::{format_complex, format_matrix, parse_matrix};
pub use stats::{
    chi_square, distribution_from_pairs, empirical, fit_slope, occupation_counts, tvd, Distribution,
};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cp_permanent::permanent_from_tree;
use crate::error::{Error, Result};
use crate::fock::{distribution_csv, exact_distribution, OccupationState, QuditVector};
use crate::linalg::{
    bandwidths_of, per_naive, per_ryser_glynn, Matrix, DEFAULT_ZERO_TOL, NAIVE_MAX,
};
use crate::photonics::{
    compose_circuit, haar_unitary, random_shallow_circuit, CircuitSpec, CompiledCircuit,
};
use crate::samplers::{
    collision_free_exact_distribution, sample_batch, sample_cc_a, sample_cc_b, sample_cc_c,
    sample_rng, sample_shallow, Sample, ShallowPlan,
};
use crate::treedec::linear_banded_decomposition;

/// Stream reserved for generating the circuit or unitary from the seed.
pub const SETUP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    CcA,
    CcB,
    CcC,
    Shallow,
    /// Every photon lands in a uniformly random mode. A negative control
    /// for validation.
    Uniform,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cc-a" => Ok(Self::CcA),
            "cc-b" => Ok(Self::CcB),
            "cc-c" => Ok(Self::CcC),
            "shallow" => Ok(Self::Shallow),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CcA => "cc-a",
            Self::CcB => "cc-b",
            Self::CcC => "cc-c",
            Self::Shallow => "shallow",
            Self::Uniform => "uniform",
        })
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Naive,
    Glynn,
    Tree,
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "glynn" => Ok(Self::Glynn),
            "tree" => Ok(Self::Tree),
            other => Err(Error::Parse(format!("unknown kernel {other:?}"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Naive => "naive",
            Self::Glynn => "glynn",
            Self::Tree => "tree",
        })
    }
}

/// Parameters shared by the sampling commands.
///
/// The interferometer is, in order of preference: the given circuit, a
/// random circuit of the given depth, or a Haar-random unitary. Random
/// ones are generated from `seed` on [`SETUP_STREAM`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub depth: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub circuit: Option<CircuitSpec>,
    pub threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::CcC,
            m: 7,
            n: 3,
            depth: None,
            samples: 200_000,
            seed: 0,
            circuit: None,
            threshold: 0.03,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        if self.algorithm == Algorithm::Shallow && self.depth.is_none() && self.circuit.is_none() {
            return Err(Error::Domain(
                "the shallow sampler needs --depth or --circuit".into(),
            ));
        }
        if self.n == 0 || self.n > self.modes() {
            return Err(Error::Domain(format!(
                "{} photons on {} modes",
                self.n,
                self.modes()
            )));
        }
        Ok(())
    }

    /// Mode count, taken from the circuit when one is given.
    pub fn modes(&self) -> usize {
        self.circuit.as_ref().map_or(self.m, |c| c.m)
    }
}

/// The interferometer a run uses.
#[derive(Debug, Clone)]
pub enum Setup {
    Circuit(CompiledCircuit<f64>),
    Haar(Matrix<Complex64>),
}

impl Setup {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.check()?;
        let mut rng = sample_rng(cfg.seed, SETUP_STREAM);
        if let Some(spec) = &cfg.circuit {
            return Ok(Self::Circuit(compose_circuit(spec)?));
        }
        match cfg.depth {
            Some(depth) => {
                let mut spec = random_shallow_circuit(cfg.m, depth, &mut rng)?;
                spec.seed = Some(cfg.seed);
                Ok(Self::Circuit(compose_circuit(&spec)?))
            }
            None => Ok(Self::Haar(haar_unitary(cfg.m, &mut rng))),
        }
    }

    pub fn unitary(&self) -> &Matrix<Complex64> {
        match self {
            Self::Circuit(c) => &c.unitary,
            Self::Haar(u) => u,
        }
    }

    pub fn circuit(&self) -> Option<&CompiledCircuit<f64>> {
        match self {
            Self::Circuit(c) => Some(c),
            Self::Haar(_) => None,
        }
    }
}

fn sample_uniform(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let r = (0..n).map(|_| rng.random_range(0..m)).collect();
    Sample::new(QuditVector(r), Vec::new(), m)
}

/// Draw `cfg.samples` samples, sample `i` from stream `i` of `cfg.seed`.
pub fn generate_samples(cfg: &RunConfig, setup: &Setup) -> Result<Vec<Sample>> {
    let (u, n, count, seed) = (setup.unitary(), cfg.n, cfg.samples, cfg.seed);
    match cfg.algorithm {
        Algorithm::CcA => sample_batch(count, seed, |rng| sample_cc_a(u, n, rng)),
        Algorithm::CcB => sample_batch(count, seed, |rng| sample_cc_b(u, n, rng)),
        Algorithm::CcC => sample_batch(count, seed, |rng| sample_cc_c(u, n, rng)),
        Algorithm::Uniform => sample_batch(count, seed, |rng| sample_uniform(u.n_rows(), n, rng)),
        Algorithm::Shallow => {
            let circuit = setup.circuit().ok_or_else(|| {
                Error::Domain("the shallow sampler needs a layered circuit".into())
            })?;
            let plan = ShallowPlan::new(circuit, n)?;
            sample_batch(count, seed, |rng| sample_shallow(&plan, rng))
        }
    }
}

fn require_samples(cfg: &RunConfig) -> Result<()> {
    if cfg.samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    r: &'a [usize],
    occupation: &'a [usize],
    alpha: &'a [usize],
    seed: u64,
    index: usize,
}

/// One JSON object per sample and line.
pub fn cmd_sample(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    require_samples(cfg)?;
    let setup = Setup::from_config(cfg)?;
    for (index, s) in generate_samples(cfg, &setup)?.iter().enumerate() {
        let record = SampleRecord {
            r: &s.r,
            occupation: &s.occupation,
            alpha: &s.alpha,
            seed: cfg.seed,
            index,
        };
        let line = serde_json::to_string(&record).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Exact output distribution as CSV.
pub fn cmd_exact(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let setup = Setup::from_config(cfg)?;
    let u = setup.unitary();
    let dist = exact_distribution(u, &OccupationState::standard_input(cfg.n, u.n_rows()))?;
    out.write_all(distribution_csv(&dist).as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutcomeRow {
    pub occupation: String,
    pub expected: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidationReport {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub reference: String,
    pub tvd: f64,
    pub chi_square: ChiSquare,
    pub threshold: f64,
    pub pass: bool,
    pub outcomes: Vec<OutcomeRow>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Reference law for an algorithm: the exact output distribution, or its
/// collision-free counterpart for the shallow sampler.
pub fn reference_distribution(
    cfg: &RunConfig,
    setup: &Setup,
) -> Result<(Distribution, &'static str)> {
    let u = setup.unitary();
    if cfg.algorithm == Algorithm::Shallow {
        let d = collision_free_exact_distribution(u, cfg.n)?;
        Ok((distribution_from_pairs(&d), "collision-free chain rule"))
    } else {
        let d = exact_distribution(u, &OccupationState::standard_input(cfg.n, u.n_rows()))?;
        Ok((distribution_from_pairs(&d), "exact"))
    }
}

/// Compare the empirical law of `cfg.samples` samples with the reference.
pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidationReport> {
    require_samples(cfg)?;
    let setup = Setup::from_config(cfg)?;
    let (expected, reference) = reference_distribution(cfg, &setup)?;
    let samples = generate_samples(cfg, &setup)?;
    Ok(build_report(cfg, reference, &expected, &samples))
}

pub fn build_report(
    cfg: &RunConfig,
    reference: &str,
    expected: &Distribution,
    samples: &[Sample],
) -> ValidationReport {
    let counts = occupation_counts(samples);
    let observed = empirical(&counts);
    let distance = tvd(expected, &observed);
    let (statistic, dof) = chi_square(expected, &counts);
    let mut keys: Vec<&Vec<usize>> = expected.keys().chain(observed.keys()).collect();
    keys.sort();
    keys.dedup();
    let outcomes = keys
        .into_iter()
        .map(|k| OutcomeRow {
            occupation: OccupationState(k.clone()).dashed(),
            expected: expected.get(k).copied().unwrap_or(0.0),
            observed: observed.get(k).copied().unwrap_or(0.0),
        })
        .collect();
    ValidationReport {
        algorithm: cfg.algorithm,
        m: cfg.modes(),
        n: cfg.n,
        samples: samples.len(),
        seed: cfg.seed,
        reference: reference.to_string(),
        tvd: distance,
        chi_square: ChiSquare { statistic, dof },
        threshold: cfg.threshold,
        pass: distance < cfg.threshold,
        outcomes,
    }
}

/// Permanent values from one or more kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct PermanentReport {
    pub values: Vec<(Kernel, Complex64)>,
}

impl PermanentReport {
    pub fn render(&self) -> String {
        self.values
            .iter()
            .map(|(k, z)| format!("{k} {}\n", format_complex(*z)))
            .collect()
    }
}

/// Relative agreement required between kernels.
pub const KERNEL_TOLERANCE: f64 = 1e-10;

/// Evaluate the permanent of the matrix in `text` with the chosen kernel,
/// or with every kernel that fits the size when none is chosen, and check
/// that they agree.
pub fn cmd_permanent(text: &str, kernel: Option<Kernel>) -> Result<PermanentReport> {
    let m = parse_matrix(text)?;
    let kernels = match kernel {
        Some(k) => vec![k],
        None if m.n_rows() <= NAIVE_MAX => vec![Kernel::Naive, Kernel::Glynn, Kernel::Tree],
        None => vec![Kernel::Glynn, Kernel::Tree],
    };
    let mut values = Vec::new();
    for k in kernels {
        let v = match k {
            Kernel::Naive => per_naive(&m)?,
            Kernel::Glynn => per_ryser_glynn(&m)?,
            Kernel::Tree => {
                if !m.is_square() {
                    return Err(Error::SizeMismatch(format!(
                        "{}x{} matrix",
                        m.n_rows(),
                        m.n_cols()
                    )));
                }
                let t = linear_banded_decomposition(&m, bandwidths_of(&m, DEFAULT_ZERO_TOL))?;
                permanent_from_tree(&t, &m)?
            }
        };
        values.push((k, v));
    }
    let scale = values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    for (k, v) in &values[1..] {
        let (k0, v0) = values[0];
        if (v - v0).norm() > KERNEL_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Disagreement(format!(
                "{k0} gives {v0}, {k} gives {v}"
            )));
        }
    }
    Ok(PermanentReport { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(
        algorithm: Algorithm,
        m: usize,
        n: usize,
        depth: Option<usize>,
        samples: usize,
    ) -> RunConfig {
        RunConfig {
            algorithm,
            m,
            n,
            depth,
            samples,
            seed: 7,
            ..RunConfig::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for a in [
            Algorithm::CcA,
            Algorithm::CcB,
            Algorithm::CcC,
            Algorithm::Shallow,
            Algorithm::Uniform,
        ] {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        for k in [Kernel::Naive, Kernel::Glynn, Kernel::Tree] {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
        assert!("cc-d".parse::<Algorithm>().is_err());
    }

    #[test]
    fn zero_samples_rejected() {
        let c = cfg(Algorithm::CcC, 4, 2, None, 0);
        assert!(matches!(
            cmd_sample(&c, &mut Vec::new()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(cmd_validate(&c), Err(Error::Domain(_))));
    }

    #[test]
    fn shallow_needs_depth() {
        assert!(Setup::from_config(&cfg(Algorithm::Shallow, 12, 3, None, 1)).is_err());
        assert!(Setup::from_config(&cfg(Algorithm::CcC, 4, 5, None, 1)).is_err());
    }

    #[test]
    fn sample_stream_is_reproducible() {
        let c = cfg(Algorithm::Shallow, 12, 3, Some(2), 10);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        cmd_sample(&c, &mut a).unwrap();
        cmd_sample(&c, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 10);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["seed"], 7);
        assert_eq!(first["index"], 0);
        assert_eq!(first["r"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn occupations_sum_to_n() {
        let c = cfg(Algorithm::CcC, 6, 2, None, 20);
        let samples = generate_samples(&c, &Setup::from_config(&c).unwrap()).unwrap();
        assert!(samples
            .iter()
            .all(|s| s.occupation.iter().sum::<usize>() == 2));
    }

    #[test]
    fn exact_csv_has_every_outcome() {
        let mut out = Vec::new();
        cmd_exact(&cfg(Algorithm::CcC, 4, 2, None, 1), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + 10);
        let total: f64 = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn report_against_itself() {
        let c = cfg(Algorithm::CcB, 5, 2, None, 0);
        let setup = Setup::from_config(&c).unwrap();
        let (expected, _) = reference_distribution(&c, &setup).unwrap();
        assert!((expected.values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(tvd(&expected, &expected), 0.0);
    }

    #[test]
    fn uniform_control_fails() {
        let mut c = cfg(Algorithm::Uniform, 7, 3, Some(1), 20_000);
        c.threshold = 0.03;
        let report = cmd_validate(&c).unwrap();
        assert!(!report.pass, "tvd {}", report.tvd);
        let expected: f64 = report.outcomes.iter().map(|o| o.expected).sum();
        assert!((expected - 1.0).abs() < 1e-9);
    }

    #[test]
    fn permanent_kernels() {
        let int_matrix = "3 3\n1 0 1 0 1 0\n1 0 1 0 0 0\n0 0 1 0 1 0\n";
        let r = cmd_permanent(int_matrix, None).unwrap();
        assert_eq!(r.values.len(), 3);
        for (_, v) in &r.values {
            assert!((v - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        }
        let id = format_matrix(&Matrix::identity(5));
        let r = cmd_permanent(&id, Some(Kernel::Glynn)).unwrap();
        assert_eq!(r.values, vec![(Kernel::Glynn, Complex64::new(1.0, 0.0))]);
        assert!(r
            .render()
            .starts_with("glynn 1.0000000000000000e0 0.0000000000000000e0"));
        assert!(matches!(
            cmd_permanent("2 2\n1 0", None),
            Err(Error::Parse(_))
        ));
    }
}
