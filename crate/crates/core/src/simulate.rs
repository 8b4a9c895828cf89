//! Empirical ground truth: Monte Carlo estimation and exhaustive
//! enumeration of decoding failure over the erasure channel, plus the
//! analytical-vs-empirical comparison records.
//!
//! Reproducibility contract: a [`SimConfig`] (including its master seed)
//! determines the result bit-for-bit, independent of worker count and
//! scheduling. Trial `t` of grid point `i` draws from the counter-based
//! stream `(master_seed, i + 1, t)`; per-trial tallies are integers, so
//! merging across workers is exact and order-free.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::analysis::AnalysisReport;
use crate::decoder::{maximal_uncorrectable_set, peel_decode, ErasurePattern};
use crate::ensemble::{sample_code_with_rng, CodeInstance, DegreeSampler, DegreeSpec};
use crate::error::{Error, Result};
use crate::rational::{is_probability, rat_pow, rational_to_f64, Rational};
use crate::rng::{derive_stream, uniform_below_biguint, uniform_below_u64};

/// What counts as failure for one (code, pattern) trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Fraction of inputs left unresolved by peeling (`|residual| / k`).
    Bit,
    /// Fraction in the maximal uncorrectable set (`|U| / k`) — the part
    /// no decoder could ever recover.
    TrivialBit,
    /// One if peeling left any input unresolved, else zero.
    Block,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Bit => "bit",
            Metric::TrivialBit => "trivial_bit",
            Metric::Block => "block",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "bit" => Ok(Metric::Bit),
            "trivial_bit" => Ok(Metric::TrivialBit),
            "block" => Ok(Metric::Block),
            other => Err(Error::Malformed(format!("unknown metric {other:?}"))),
        }
    }

    /// Numerator of the per-trial value; the denominator is
    /// [`Metric::denominator`] of `k`.
    fn numerator(self, code: &CodeInstance, pattern: &ErasurePattern) -> Result<u64> {
        Ok(match self {
            Metric::Bit => peel_decode(code, pattern)?.residual.len() as u64,
            Metric::TrivialBit => maximal_uncorrectable_set(code, pattern)?.len() as u64,
            Metric::Block => u64::from(!peel_decode(code, pattern)?.residual.is_empty()),
        })
    }

    fn denominator(self, k: usize) -> u64 {
        match self {
            Metric::Bit | Metric::TrivialBit => k as u64,
            Metric::Block => 1,
        }
    }
}

/// How the failure probability is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Sampled codes and sampled erasures.
    MonteCarlo,
    /// One fixed code, all `2^n` erasure patterns, exact.
    ExhaustivePatterns,
    /// Every labeled code realization and all patterns, exact.
    ExhaustiveTinyEnsemble,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::MonteCarlo => "mc",
            Mode::ExhaustivePatterns => "exhaustive",
            Mode::ExhaustiveTinyEnsemble => "tiny-ensemble",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "mc" => Ok(Mode::MonteCarlo),
            "exhaustive" => Ok(Mode::ExhaustivePatterns),
            "tiny-ensemble" => Ok(Mode::ExhaustiveTinyEnsemble),
            other => Err(Error::Malformed(format!("unknown mode {other:?}"))),
        }
    }
}

/// One simulation request.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub k: usize,
    pub n: usize,
    pub spec: DegreeSpec,
    pub epsilons: Vec<Rational>,
    pub trials: u64,
    pub master_seed: u64,
    pub mode: Mode,
    pub metric: Metric,
    /// Evaluate against this code instead of sampling fresh ones
    /// (required semantics for `ExhaustivePatterns` when provided;
    /// otherwise one is sampled deterministically from the master seed).
    pub fixed_code: Option<CodeInstance>,
    /// Cap on worker threads; affects speed only, never results.
    pub max_workers: Option<usize>,
}

impl SimConfig {
    pub fn new(k: usize, n: usize, spec: DegreeSpec, epsilons: Vec<Rational>) -> Self {
        Self {
            k,
            n,
            spec,
            epsilons,
            trials: 10_000,
            master_seed: 0,
            mode: Mode::MonteCarlo,
            metric: Metric::Bit,
            fixed_code: None,
            max_workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidArgument("empty epsilon grid".into()));
        }
        for eps in &self.epsilons {
            if !is_probability(eps) {
                return Err(Error::InvalidArgument(format!(
                    "epsilon must lie in [0, 1], got {eps}"
                )));
            }
        }
        if let Some(code) = &self.fixed_code {
            if code.k() != self.k || code.n() != self.n {
                return Err(Error::Mismatch(format!(
                    "fixed code is {}x{}, config says {}x{}",
                    code.k(),
                    code.n(),
                    self.k,
                    self.n
                )));
            }
        }
        match self.mode {
            Mode::MonteCarlo => {
                if self.trials < 1 {
                    return Err(Error::InvalidArgument("trials must be >= 1".into()));
                }
            }
            Mode::ExhaustivePatterns => {
                if self.n > 22 {
                    return Err(Error::Guard(format!(
                        "exhaustive pattern enumeration requires n <= 22, got n={}",
                        self.n
                    )));
                }
            }
            Mode::ExhaustiveTinyEnsemble => {
                if self.k > 4 || self.n > 5 || self.spec.d_max() > 2 {
                    return Err(Error::Guard(format!(
                        "tiny-ensemble enumeration requires k <= 4, n <= 5, d_max <= 2; \
                         got k={}, n={}, d_max={}",
                        self.k,
                        self.n,
                        self.spec.d_max()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One grid point of a simulation result.
#[derive(Clone, Debug, PartialEq)]
pub struct SimPoint {
    pub epsilon: Rational,
    /// Double rendering of the estimate (or of the exact value).
    pub estimate: f64,
    /// Exact value, present for the exhaustive modes.
    pub exact: Option<Rational>,
    /// Monte Carlo standard error; `None` for exact modes and for
    /// single-trial runs.
    pub stderr: Option<f64>,
    /// Trials for Monte Carlo; evaluations for exhaustive modes.
    pub trials: u64,
}

/// Simulation output plus provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
    pub mode: Mode,
    pub metric: Metric,
    pub master_seed: u64,
    /// Hash of the fixed code when one was used.
    pub code_hash: Option<String>,
}

/// Exact Bernoulli draw at a rational probability.
enum ExactBernoulli {
    Never,
    Always,
    Small { num: u64, den: u64 },
    Big { num: BigUint, den: BigUint },
}

impl ExactBernoulli {
    fn new(p: &Rational) -> Self {
        if p.is_zero() {
            return Self::Never;
        }
        if p.is_one() {
            return Self::Always;
        }
        match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(num), Some(den)) => Self::Small { num, den },
            _ => Self::Big {
                num: p.numer().to_biguint().expect("probability is non-negative"),
                den: p.denom().to_biguint().expect("positive denominator"),
            },
        }
    }

    fn draw(&self, rng: &mut impl RngCore) -> bool {
        match self {
            Self::Never => false,
            Self::Always => true,
            Self::Small { num, den } => uniform_below_u64(rng, *den) < *num,
            Self::Big { num, den } => uniform_below_biguint(rng, den) < *num,
        }
    }
}

/// Monte Carlo estimate of the failure probability on an epsilon grid.
///
/// Each trial samples a fresh code from the spec (unless a fixed code is
/// supplied), erases each output independently with probability epsilon,
/// and records the metric. Bit-identical across runs and worker counts.
pub fn mc_bit_erasure(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let sampler = DegreeSampler::new(&cfg.spec);
    if cfg.fixed_code.is_none() && cfg.spec.d_max() > cfg.k {
        return Err(Error::InvalidArgument(format!(
            "output degree d_max={} exceeds k={}",
            cfg.spec.d_max(),
            cfg.k
        )));
    }
    let denominator = cfg.metric.denominator(cfg.k);
    let mut points = Vec::with_capacity(cfg.epsilons.len());

    for (eps_index, epsilon) in cfg.epsilons.iter().enumerate() {
        let bernoulli = ExactBernoulli::new(epsilon);
        let run_trial = |trial: u64| -> Result<u64> {
            let mut rng = derive_stream(cfg.master_seed, eps_index as u64 + 1, trial);
            let sampled;
            let code = match &cfg.fixed_code {
                Some(code) => code,
                None => {
                    sampled =
                        sample_code_with_rng(cfg.k, cfg.n, &cfg.spec, &sampler, &mut rng)?;
                    &sampled
                }
            };
            let erased: Vec<usize> = (0..cfg.n)
                .filter(|_| bernoulli.draw(&mut rng))
                .collect();
            let pattern = ErasurePattern::new(erased, cfg.n)?;
            cfg.metric.numerator(code, &pattern)
        };

        let (sum, sum_sq) = accumulate_trials(cfg, &run_trial)?;
        let trials = cfg.trials;
        let mean_exact = Rational::new(
            num_bigint::BigInt::from(sum),
            (BigUint::from(denominator) * BigUint::from(trials)).into(),
        );
        let estimate = rational_to_f64(&mean_exact);
        let stderr = if trials >= 2 {
            let t = trials as f64;
            let den_f = denominator as f64;
            let sum_f = u128_to_f64(sum) / den_f;
            let sumsq_f = u128_to_f64(sum_sq) / (den_f * den_f);
            let variance = ((sumsq_f - sum_f * sum_f / t) / (t - 1.0)).max(0.0);
            Some((variance / t).sqrt())
        } else {
            None
        };
        points.push(SimPoint {
            epsilon: epsilon.clone(),
            estimate,
            exact: None,
            stderr,
            trials,
        });
    }

    Ok(SimResult {
        points,
        mode: Mode::MonteCarlo,
        metric: cfg.metric,
        master_seed: cfg.master_seed,
        code_hash: cfg.fixed_code.as_ref().map(CodeInstance::hash_hex),
    })
}

fn u128_to_f64(x: u128) -> f64 {
    x as f64
}

/// Run trials `0..cfg.trials`, summing metric numerators and their
/// squares. Work is split into fixed-size chunks pulled by worker
/// threads; integer sums commute, so the result is schedule-independent.
fn accumulate_trials(
    cfg: &SimConfig,
    run_trial: &(dyn Fn(u64) -> Result<u64> + Sync),
) -> Result<(u128, u128)> {
    const CHUNK: u64 = 4096;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let hardware = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    let workers = cfg
        .max_workers
        .unwrap_or(hardware)
        .clamp(1, hardware.max(1))
        .min(chunks as usize);

    if workers <= 1 {
        let mut sum = 0u128;
        let mut sum_sq = 0u128;
        for trial in 0..cfg.trials {
            let v = run_trial(trial)? as u128;
            sum += v;
            sum_sq += v * v;
        }
        return Ok((sum, sum_sq));
    }

    let next_chunk = AtomicU64::new(0);
    let totals = Mutex::new((0u128, 0u128));
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut local_sum = 0u128;
                let mut local_sq = 0u128;
                loop {
                    let chunk = next_chunk.fetch_add(1, Ordering::Relaxed);
                    if chunk >= chunks {
                        break;
                    }
                    let lo = chunk * CHUNK;
                    let hi = (lo + CHUNK).min(cfg.trials);
                    for trial in lo..hi {
                        match run_trial(trial) {
                            Ok(v) => {
                                let v = v as u128;
                                local_sum += v;
                                local_sq += v * v;
                            }
                            Err(e) => {
                                *failure.lock().unwrap() = Some(e);
                                return;
                            }
                        }
                    }
                }
                let mut totals = totals.lock().unwrap();
                totals.0 += local_sum;
                totals.1 += local_sq;
            });
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(totals.into_inner().unwrap())
}

/// Exact failure probability of one code under independent erasures:
/// the metric averaged over all `2^n` patterns with weight
/// `eps^|e| (1-eps)^(n-|e|)`. Guarded at `n <= 22`.
pub fn exhaustive_failure_probability(
    code: &CodeInstance,
    epsilon: &Rational,
    metric: Metric,
) -> Result<Rational> {
    if code.n() > 22 {
        return Err(Error::Guard(format!(
            "exhaustive pattern enumeration requires n <= 22, got n={}",
            code.n()
        )));
    }
    if !is_probability(epsilon) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let n = code.n();
    let denominator = metric.denominator(code.k());
    // group patterns by |e|: numerator sums per weight class
    let mut class_sums = vec![0u128; n + 1];
    for mask in 0u64..(1u64 << n) {
        let pattern = ErasurePattern::from_mask(mask, n)?;
        class_sums[pattern.size()] += metric.numerator(code, &pattern)? as u128;
    }
    let mut total = Rational::zero();
    let complement = Rational::one() - epsilon;
    for (e_size, &sum) in class_sums.iter().enumerate() {
        if sum == 0 {
            continue;
        }
        total += rat_pow(epsilon, e_size as u32)
            * rat_pow(&complement, (n - e_size) as u32)
            * Rational::new(num_bigint::BigInt::from(sum), denominator.into());
    }
    Ok(total)
}

/// [`exhaustive_failure_probability`] under the bit metric.
pub fn exhaustive_bit_erasure(code: &CodeInstance, epsilon: &Rational) -> Result<Rational> {
    exhaustive_failure_probability(code, epsilon, Metric::Bit)
}

/// Exact ensemble average over every labeled code realization: each
/// output picks a degree from the support (weight `rho_d`) and one of
/// the `C(k, d)` neighbor subsets uniformly. Guarded at `k <= 4`,
/// `n <= 5`, `d_max <= 2`.
pub fn exhaustive_tiny_ensemble_with_metric(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    epsilon: &Rational,
    metric: Metric,
) -> Result<Rational> {
    if k > 4 || n > 5 || spec.d_max() > 2 {
        return Err(Error::Guard(format!(
            "tiny-ensemble enumeration requires k <= 4, n <= 5, d_max <= 2; \
             got k={k}, n={n}, d_max={}",
            spec.d_max()
        )));
    }
    if spec.d_max() > k {
        return Err(Error::InvalidArgument(format!(
            "output degree d_max={} exceeds k={k}",
            spec.d_max()
        )));
    }
    // options one output node can take: (neighbor set, probability)
    let mut options: Vec<(Vec<usize>, Rational)> = Vec::new();
    for (&d, mass) in spec.rho() {
        let subsets: Vec<Vec<usize>> = (0u32..1 << k)
            .filter(|m| m.count_ones() as usize == d)
            .map(|m| (0..k).filter(|&j| m >> j & 1 == 1).collect())
            .collect();
        let per_subset = mass / Rational::from_integer(num_bigint::BigInt::from(subsets.len()));
        for subset in subsets {
            options.push((subset, per_subset.clone()));
        }
    }

    let mut total = Rational::zero();
    let mut outputs: Vec<Vec<usize>> = Vec::with_capacity(n);
    enumerate_codes(
        k,
        n,
        &options,
        &mut outputs,
        &Rational::one(),
        epsilon,
        metric,
        &mut total,
    )?;
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_codes(
    k: usize,
    n: usize,
    options: &[(Vec<usize>, Rational)],
    outputs: &mut Vec<Vec<usize>>,
    weight: &Rational,
    epsilon: &Rational,
    metric: Metric,
    total: &mut Rational,
) -> Result<()> {
    if outputs.len() == n {
        let code = CodeInstance::new(k, outputs.clone())?;
        let value = exhaustive_failure_probability(&code, epsilon, metric)?;
        *total += weight * value;
        return Ok(());
    }
    for (subset, p) in options {
        outputs.push(subset.clone());
        let w = weight * p;
        enumerate_codes(k, n, options, outputs, &w, epsilon, metric, total)?;
        outputs.pop();
    }
    Ok(())
}

/// Tiny-ensemble oracle under the bit metric.
pub fn exhaustive_tiny_ensemble(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    epsilon: &Rational,
) -> Result<Rational> {
    exhaustive_tiny_ensemble_with_metric(k, n, spec, epsilon, Metric::Bit)
}

/// Dispatch a configured run to the right evaluator.
pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    match cfg.mode {
        Mode::MonteCarlo => mc_bit_erasure(cfg),
        Mode::ExhaustivePatterns => {
            let sampled;
            let code = match &cfg.fixed_code {
                Some(code) => code,
                None => {
                    sampled = crate::ensemble::sample_code(
                        cfg.k,
                        cfg.n,
                        &cfg.spec,
                        cfg.master_seed,
                    )?;
                    &sampled
                }
            };
            let evaluations = 1u64 << cfg.n;
            let points = cfg
                .epsilons
                .iter()
                .map(|eps| {
                    let exact = exhaustive_failure_probability(code, eps, cfg.metric)?;
                    Ok(SimPoint {
                        epsilon: eps.clone(),
                        estimate: rational_to_f64(&exact),
                        exact: Some(exact),
                        stderr: None,
                        trials: evaluations,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SimResult {
                points,
                mode: cfg.mode,
                metric: cfg.metric,
                master_seed: cfg.master_seed,
                code_hash: Some(code.hash_hex()),
            })
        }
        Mode::ExhaustiveTinyEnsemble => {
            let points = cfg
                .epsilons
                .iter()
                .map(|eps| {
                    let exact = exhaustive_tiny_ensemble_with_metric(
                        cfg.k, cfg.n, &cfg.spec, eps, cfg.metric,
                    )?;
                    Ok(SimPoint {
                        epsilon: eps.clone(),
                        estimate: rational_to_f64(&exact),
                        exact: Some(exact),
                        stderr: None,
                        trials: 0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SimResult {
                points,
                mode: cfg.mode,
                metric: cfg.metric,
                master_seed: cfg.master_seed,
                code_hash: None,
            })
        }
    }
}

/// How an analytical value relates to its empirical counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactMatch,
    Within3Sigma,
    Divergent,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::ExactMatch => "exact_match",
            Verdict::Within3Sigma => "within_3_sigma",
            Verdict::Divergent => "divergent",
        }
    }
}

/// One epsilon's analytical-vs-empirical comparison. Descriptive only:
/// a divergent verdict is information, not a failure.
#[derive(Clone, Debug)]
pub struct ComparisonRecord {
    pub epsilon: Rational,
    pub analytical_pb: Rational,
    pub analytical_integrated: Rational,
    pub empirical_estimate: f64,
    pub empirical_exact: Option<Rational>,
    pub stderr: Option<f64>,
    pub abs_gap: f64,
    pub rel_gap: Option<f64>,
    pub clamp_events: u64,
    pub verdict: Verdict,
}

/// Join analytical reports with an empirical result on a shared epsilon
/// grid. Grids must match exactly.
pub fn compare_report(
    analytical: &[(Rational, AnalysisReport)],
    empirical: &SimResult,
) -> Result<Vec<ComparisonRecord>> {
    if analytical.len() != empirical.points.len() {
        return Err(Error::Mismatch(format!(
            "analytical grid has {} points, empirical has {}",
            analytical.len(),
            empirical.points.len()
        )));
    }
    let mut records = Vec::with_capacity(analytical.len());
    for ((eps, report), point) in analytical.iter().zip(&empirical.points) {
        if *eps != point.epsilon {
            return Err(Error::Mismatch(format!(
                "epsilon grids differ: analytical {eps} vs empirical {}",
                point.epsilon
            )));
        }
        let pb = &report.pb_uncorrectable;
        let (abs_gap, verdict) = match &point.exact {
            Some(exact) => {
                let gap = rational_to_f64(&(exact - pb).abs());
                let verdict = if exact == pb {
                    Verdict::ExactMatch
                } else {
                    Verdict::Divergent
                };
                (gap, verdict)
            }
            None => {
                let gap = (point.estimate - rational_to_f64(pb)).abs();
                let verdict = if gap == 0.0 {
                    Verdict::ExactMatch
                } else if point.stderr.map(|s| gap <= 3.0 * s).unwrap_or(false) {
                    Verdict::Within3Sigma
                } else {
                    Verdict::Divergent
                };
                (gap, verdict)
            }
        };
        let pb_f64 = rational_to_f64(pb);
        let rel_gap = if pb.is_zero() { None } else { Some(abs_gap / pb_f64.abs()) };
        records.push(ComparisonRecord {
            epsilon: eps.clone(),
            analytical_pb: pb.clone(),
            analytical_integrated: report.integrated.clone(),
            empirical_estimate: point.estimate,
            empirical_exact: point.exact.clone(),
            stderr: point.stderr,
            abs_gap,
            rel_gap,
            clamp_events: report.clamp_events,
            verdict,
        });
    }
    Ok(records)
}
