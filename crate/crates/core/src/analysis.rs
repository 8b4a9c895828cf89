//! Analytical evaluators: erased-edge distributions, ensemble-average
//! bit erasure probability, stopping-set probabilities, and the
//! integrated error estimate combining both failure mechanisms.
//!
//! Every quantity is evaluated in exact rational arithmetic; requests
//! carry the channel erasure probability as an exact rational and reports
//! carry exact values (callers convert to doubles for presentation).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ensemble::{DegreeSpec, InputSpec};
use crate::error::{Error, Result};
use crate::genpoly::{binomial, output_generating_poly, CountTable};
use crate::rational::{is_probability, rat_pow, Rational};

/// Which length the stopping-probability binomial ratios are taken over.
/// The printed formula uses the output length `n`; the input-length
/// variant is exposed because the text leaves room for either reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BinomialBase {
    #[default]
    OutputLength,
    InputLength,
}

impl BinomialBase {
    fn resolve(self, k: usize, n: usize) -> usize {
        match self {
            BinomialBase::OutputLength => n,
            BinomialBase::InputLength => k,
        }
    }

    fn label(self) -> &'static str {
        match self {
            BinomialBase::OutputLength => "n",
            BinomialBase::InputLength => "k",
        }
    }
}

/// Parameters of one analytical evaluation.
#[derive(Clone, Debug)]
pub struct AnalysisRequest {
    pub k: usize,
    pub n: usize,
    pub spec: DegreeSpec,
    /// Channel erasure probability, exact.
    pub epsilon: Rational,
    /// Restrict the outer sum over erasure sizes `|e|`; `None` means the
    /// full `0..=n`.
    pub e_size_range: Option<(usize, usize)>,
    /// Truncation of the stopping-set size sum (natural range `k`).
    pub s_max: usize,
    /// Truncation of the degree-zero-check sum (natural range `n`).
    pub z_max: usize,
    pub binomial_base: BinomialBase,
}

impl AnalysisRequest {
    /// Request with full natural ranges: `s_max = k`, `z_max = n`.
    pub fn new(k: usize, n: usize, spec: DegreeSpec, epsilon: Rational) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "analysis needs k >= 1 and n >= 1, got k={k}, n={n}"
            )));
        }
        if !is_probability(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self {
            k,
            n,
            spec,
            epsilon,
            e_size_range: None,
            s_max: k,
            z_max: n,
            binomial_base: BinomialBase::default(),
        })
    }

    pub fn with_truncations(mut self, s_max: usize, z_max: usize) -> Result<Self> {
        if s_max > self.k {
            return Err(Error::InvalidArgument(format!(
                "s_max={s_max} exceeds k={}",
                self.k
            )));
        }
        if z_max > self.n {
            return Err(Error::InvalidArgument(format!(
                "z_max={z_max} exceeds n={}",
                self.n
            )));
        }
        self.s_max = s_max;
        self.z_max = z_max;
        Ok(self)
    }

    pub fn with_e_size_range(mut self, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi || hi > self.n {
            return Err(Error::InvalidArgument(format!(
                "e-size range {lo}..={hi} invalid for n={}",
                self.n
            )));
        }
        self.e_size_range = Some((lo, hi));
        Ok(self)
    }

    pub fn with_binomial_base(mut self, base: BinomialBase) -> Self {
        self.binomial_base = base;
        self
    }
}

/// Output of the analytical evaluators. All values exact; `flags` lists
/// anything out of the probability range rather than clamping it.
#[derive(Clone, Debug)]
pub struct AnalysisReport {
    /// Ensemble-average bit erasure probability from uncorrectable sets.
    pub pb_uncorrectable: Rational,
    /// Contribution of each erasure size `|e|` to `pb_uncorrectable`.
    pub per_e_breakdown: BTreeMap<usize, Rational>,
    /// Structural stopping-set term (weighted by failed-symbol count `s`).
    pub stopping_term: Rational,
    /// Same term weighted `s/k` to read as a per-bit probability.
    pub stopping_term_per_bit: Rational,
    /// `pb_uncorrectable + stopping_term`, exact.
    pub integrated: Rational,
    /// Number of times the counting recursion clamped a negative
    /// survivor count.
    pub clamp_events: u64,
    /// Out-of-range warnings; empty when all values are probabilities.
    pub flags: Vec<String>,
    /// Evaluation settings (truncations, formula variants).
    pub metadata: BTreeMap<String, String>,
}

/// Distribution of the erased-edge count `L` given that `e_size` outputs
/// were erased: `L -> numerator / C(n, e_size)`. Entries exist exactly
/// for achievable `L`; they always lie within
/// `[e_size * d_min, e_size * d_max]` and sum to one.
pub fn edge_distribution(
    spec: &DegreeSpec,
    n: usize,
    e_size: usize,
) -> Result<BTreeMap<u64, Rational>> {
    if e_size > n {
        return Err(Error::InvalidArgument(format!(
            "e_size={e_size} exceeds n={n}"
        )));
    }
    let poly = output_generating_poly(spec, n)?;
    let denominator = binomial(n as i64, e_size as i64);
    let mut distribution = BTreeMap::new();
    for (&(a, b), coef) in poly.terms() {
        if a as usize == e_size {
            distribution.insert(b as u64, Rational::new(coef.clone(), denominator.clone()));
        }
    }
    Ok(distribution)
}

fn channel_weight(n: usize, e_size: usize, epsilon: &Rational) -> Rational {
    Rational::from_integer(binomial(n as i64, e_size as i64))
        * rat_pow(epsilon, e_size as u32)
        * rat_pow(&(Rational::one() - epsilon), (n - e_size) as u32)
}

fn base_metadata(req: &AnalysisRequest) -> BTreeMap<String, String> {
    let (lo, hi) = req.e_size_range.unwrap_or((0, req.n));
    let mut metadata = BTreeMap::new();
    metadata.insert("e_size_range".into(), format!("{lo}..={hi}"));
    metadata.insert("s_max".into(), req.s_max.to_string());
    metadata.insert("z_max".into(), req.z_max.to_string());
    metadata.insert(
        "eq14_binomial_base".into(),
        req.binomial_base.label().into(),
    );
    metadata
}

/// Ensemble-average bit erasure probability due to uncorrectable sets:
///
/// `sum_|e| C(n,|e|) eps^|e| (1-eps)^(n-|e|)
///    * sum_L p(L edges erased | |e|)
///    * sum_{V>=1} (V/k) P(e, L, V)`
///
/// with the erased-socket budget instantiated per `|e|` as the maximal
/// achievable count `|e| * d_max`. Fills only the `pb` fields of the
/// report; stopping terms are zero.
pub fn avg_bit_erasure(req: &AnalysisRequest) -> Result<AnalysisReport> {
    let AnalysisRequest { k, n, spec, epsilon, .. } = req;
    let (k, n) = (*k, *n);
    let poly = output_generating_poly(spec, n)?;
    let (lo, hi) = req.e_size_range.unwrap_or((0, n));
    if hi > n || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "e-size range {lo}..={hi} invalid for n={n}"
        )));
    }

    let mut pb = Rational::zero();
    let mut per_e_breakdown = BTreeMap::new();
    let mut clamp_events = 0u64;
    let k_rational = Rational::from_integer(BigInt::from(k));

    for e_size in lo..=hi {
        let weight = channel_weight(n, e_size, epsilon);
        if weight.is_zero() {
            per_e_breakdown.insert(e_size, Rational::zero());
            continue;
        }
        let slice: Vec<(u64, BigInt)> = poly
            .terms()
            .filter(|(&(a, b), _)| a as usize == e_size && b >= 1)
            .map(|(&(_, b), c)| (b as u64, c.clone()))
            .collect();
        if slice.is_empty() {
            per_e_breakdown.insert(e_size, Rational::zero());
            continue;
        }
        let pattern_count = binomial(n as i64, e_size as i64);
        let budget = (e_size * spec.d_max()) as u64;
        let table = CountTable::new(k, budget, spec)?;
        let mut inner = Rational::zero();
        for (edge_total, numerator) in slice {
            let edge_probability = Rational::new(numerator, pattern_count.clone());
            let mut v_sum = Rational::zero();
            for v in 1..=k {
                let p = table.slice_probability(edge_total, v)?;
                if !p.is_zero() {
                    v_sum += Rational::from_integer(BigInt::from(v)) / &k_rational * p;
                }
            }
            inner += edge_probability * v_sum;
        }
        let contribution = weight * inner;
        pb += &contribution;
        per_e_breakdown.insert(e_size, contribution);
        clamp_events += table.clamp_events();
    }

    let mut flags = Vec::new();
    if !is_probability(&pb) {
        flags.push(format!("pb_uncorrectable outside [0, 1]: {pb}"));
    }
    Ok(AnalysisReport {
        pb_uncorrectable: pb.clone(),
        per_e_breakdown,
        stopping_term: Rational::zero(),
        stopping_term_per_bit: Rational::zero(),
        integrated: pb,
        clamp_events,
        flags,
        metadata: base_metadata(req),
    })
}

/// Probability that a randomly chosen output node misses a fixed
/// `s`-subset of the inputs entirely: `sum_d rho_d C(k-s, d) / C(k, d)`.
/// Degrees `d > k` contribute nothing.
pub fn theta_miss_probability(k: usize, spec: &DegreeSpec, s: usize) -> Result<Rational> {
    if s > k {
        return Err(Error::InvalidArgument(format!("s={s} exceeds k={k}")));
    }
    let mut total = Rational::zero();
    for (&d, mass) in spec.rho() {
        let all = binomial(k as i64, d as i64);
        if all.is_zero() {
            continue; // d > k: no such output exists
        }
        let avoiding = binomial(k as i64 - s as i64, d as i64);
        total += mass * Rational::new(avoiding, all);
    }
    Ok(total)
}

/// Probability that a randomly chosen output node touches a fixed
/// `s`-subset exactly once: `sum_d rho_d * s * C(k-s, d-1) / C(k, d)`.
pub fn theta_single_hit_probability(k: usize, spec: &DegreeSpec, s: usize) -> Result<Rational> {
    if s > k {
        return Err(Error::InvalidArgument(format!("s={s} exceeds k={k}")));
    }
    let mut total = Rational::zero();
    for (&d, mass) in spec.rho() {
        let all = binomial(k as i64, d as i64);
        if all.is_zero() {
            continue;
        }
        let one_inside =
            BigInt::from(s) * binomial(k as i64 - s as i64, d as i64 - 1);
        total += mass * Rational::new(one_inside, all);
    }
    Ok(total)
}

/// Probability that a fixed `s`-subset of the inputs sees exactly `z`
/// output nodes of degree zero into it and none of degree one:
/// `C(n, z) p0^z (1 - p0 - p1)^(n - z)`.
pub fn stopping_profile_probability(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    s: usize,
    z: usize,
) -> Result<Rational> {
    if z > n {
        return Err(Error::InvalidArgument(format!("z={z} exceeds n={n}")));
    }
    let p0 = theta_miss_probability(k, spec, s)?;
    let p1 = theta_single_hit_probability(k, spec, s)?;
    let neither = Rational::one() - &p0 - p1;
    Ok(Rational::from_integer(binomial(n as i64, z as i64))
        * rat_pow(&p0, z as u32)
        * rat_pow(&neither, (n - z) as u32))
}

fn unseen_column_factor(base: usize, z: usize, spec: &DegreeSpec) -> Rational {
    // 1 - sum_d rho_d C(base - z, d) / C(base, d)
    let mut seen = Rational::zero();
    for (&d, mass) in spec.rho() {
        let all = binomial(base as i64, d as i64);
        if all.is_zero() {
            continue;
        }
        seen += mass * Rational::new(binomial(base as i64 - z as i64, d as i64), all);
    }
    Rational::one() - seen
}

/// Probability bound that the code has a maximal stopping set of size
/// `s`, truncating the degree-zero-check sum at `z_max`:
///
/// `C(k, s) * sum_{z=0}^{z_max} profile(s, z)
///     * (1 - sum_d rho_d C(n-z, d)/C(n, d))^(k-s)`
pub fn stopping_set_probability(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    s: usize,
    z_max: usize,
) -> Result<Rational> {
    stopping_set_probability_with_base(k, n, spec, s, z_max, BinomialBase::default())
}

/// [`stopping_set_probability`] with an explicit binomial base (the
/// printed formula draws its column ratios over `n`; `k` is the
/// alternative reading).
pub fn stopping_set_probability_with_base(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    s: usize,
    z_max: usize,
    base: BinomialBase,
) -> Result<Rational> {
    if s == 0 || s > k {
        return Err(Error::InvalidArgument(format!(
            "stopping-set size must satisfy 1 <= s <= k={k}, got {s}"
        )));
    }
    if z_max > n {
        return Err(Error::InvalidArgument(format!("z_max={z_max} exceeds n={n}")));
    }
    let base_len = base.resolve(k, n);
    let mut total = Rational::zero();
    for z in 0..=z_max {
        let profile = stopping_profile_probability(k, n, spec, s, z)?;
        if profile.is_zero() {
            continue;
        }
        let factor = rat_pow(&unseen_column_factor(base_len, z, spec), (k - s) as u32);
        total += profile * factor;
    }
    Ok(Rational::from_integer(binomial(k as i64, s as i64)) * total)
}

/// Integrated decoding error estimate: the uncorrectable-set term plus
/// the structural stopping-set term
/// `sum_{s=1}^{s_max} s * S(k, n, s)` (and its `s/k`-weighted per-bit
/// variant). Values above one are flagged, never clamped.
pub fn integrated_error(req: &AnalysisRequest) -> Result<AnalysisReport> {
    let mut report = avg_bit_erasure(req)?;
    let mut stopping_term = Rational::zero();
    for s in 1..=req.s_max {
        let per_size = stopping_set_probability_with_base(
            req.k,
            req.n,
            &req.spec,
            s,
            req.z_max,
            req.binomial_base,
        )?;
        stopping_term += Rational::from_integer(BigInt::from(s)) * per_size;
    }
    let per_bit = &stopping_term / Rational::from_integer(BigInt::from(req.k));
    report.integrated = &report.pb_uncorrectable + &stopping_term;
    report.stopping_term = stopping_term;
    report.stopping_term_per_bit = per_bit;
    if !is_probability(&report.stopping_term) {
        report
            .flags
            .push(format!("stopping_term outside [0, 1]: {}", report.stopping_term));
    }
    if !is_probability(&report.integrated) {
        report
            .flags
            .push(format!("integrated outside [0, 1]: {}", report.integrated));
    }
    report
        .metadata
        .insert("eq15_exponent".into(), "k-s".into());
    report.metadata.insert(
        "reduced_argument_variant".into(),
        "unimplemented".into(),
    );
    Ok(report)
}

/// True when the spec's input side is a point mass at `r` — the case
/// where the lambda path and the constant-row-weight path must agree
/// exactly.
pub fn lambda_is_point_mass(spec: &DegreeSpec, r: usize) -> bool {
    match spec.input() {
        InputSpec::Lambda(map) => map.len() == 1 && map.get(&r).map(Rational::is_one) == Some(true),
        InputSpec::RowWeight(w) => *w == r,
        InputSpec::Unspecified => false,
    }
}
