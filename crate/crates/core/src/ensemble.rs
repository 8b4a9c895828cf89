//! Degree distributions and random LT-code sampling.
//!
//! An LT code draws, for every output node, a degree `d` from the output
//! distribution and then a uniformly random `d`-subset of the `k` input
//! nodes (distinct neighbors, no repeated edges). The sampled bipartite
//! graph doubles as the `k x n` binary generator matrix; the submatrix of
//! surviving columns is what erasure decoding works against.
//!
//! Input-node degrees are *induced* by output sampling. The optional
//! input-side description (`lambda`, or a constant row weight) is consumed
//! only by the analytical counting machinery, never by the sampler.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::decoder::ErasurePattern;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, rational_from_f64, Rational};
use crate::rng::{floyd_sample, seed_rng, uniform_below_biguint, uniform_below_u64};

/// Input-node degree information carried alongside the output
/// distribution. Only the analytical evaluators read this.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum InputSpec {
    /// Input-node degree distribution `lambda(j)`, degrees may include 0.
    Lambda(BTreeMap<usize, Rational>),
    /// Every input node has exactly this many output neighbors.
    RowWeight(usize),
    /// No input-side information; analytical operations that need it
    /// error out.
    #[default]
    Unspecified,
}

/// An output degree distribution `rho(d)` plus optional input-side
/// degree information. All masses are exact rationals summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSpec {
    rho: BTreeMap<usize, Rational>,
    input: InputSpec,
}

impl DegreeSpec {
    /// Build from output-degree masses. Zero masses are dropped; the
    /// remaining masses must be positive, keyed by degrees `>= 1`, and
    /// sum to exactly one.
    pub fn new<I>(rho: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (d, mass) in rho {
            if mass.is_zero() {
                continue;
            }
            if mass.is_negative() {
                return Err(Error::InvalidSpec(format!("rho({d}) is negative")));
            }
            if d == 0 {
                return Err(Error::InvalidSpec("rho(0) not allowed: output degrees start at 1".into()));
            }
            if map.insert(d, mass).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate rho degree {d}")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidSpec("empty output degree distribution".into()));
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidSpec(format!(
                "rho masses sum to {total}, expected exactly 1"
            )));
        }
        Ok(Self {
            rho: map,
            input: InputSpec::Unspecified,
        })
    }

    /// Attach an input-node degree distribution (degrees may include 0).
    pub fn with_lambda<I>(mut self, lambda: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (j, mass) in lambda {
            if mass.is_zero() {
                continue;
            }
            if mass.is_negative() {
                return Err(Error::InvalidSpec(format!("lambda({j}) is negative")));
            }
            if map.insert(j, mass).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate lambda degree {j}")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidSpec("empty input degree distribution".into()));
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidSpec(format!(
                "lambda masses sum to {total}, expected exactly 1"
            )));
        }
        self.input = InputSpec::Lambda(map);
        Ok(self)
    }

    /// Attach a constant row weight `r >= 1`.
    pub fn with_row_weight(mut self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSpec("row_weight must be >= 1".into()));
        }
        self.input = InputSpec::RowWeight(r);
        Ok(self)
    }

    pub fn rho(&self) -> &BTreeMap<usize, Rational> {
        &self.rho
    }

    pub fn input(&self) -> &InputSpec {
        &self.input
    }

    pub fn lambda(&self) -> Option<&BTreeMap<usize, Rational>> {
        match &self.input {
            InputSpec::Lambda(map) => Some(map),
            _ => None,
        }
    }

    pub fn row_weight(&self) -> Option<usize> {
        match self.input {
            InputSpec::RowWeight(r) => Some(r),
            _ => None,
        }
    }

    /// Largest output degree with positive mass.
    pub fn d_max(&self) -> usize {
        *self.rho.keys().next_back().expect("rho never empty")
    }

    /// Smallest output degree with positive mass.
    pub fn d_min(&self) -> usize {
        *self.rho.keys().next().expect("rho never empty")
    }

    /// Largest input degree with positive mass, when `lambda` is present.
    pub fn v_max(&self) -> Option<usize> {
        self.lambda().map(|l| *l.keys().next_back().expect("lambda never empty"))
    }

    /// Parse the JSON wire format:
    /// `{"rho": [[d, "p"], ...], "lambda": [[j, "p"], ...], "row_weight": r}`
    /// with probabilities as decimal or `"num/den"` strings (bare JSON
    /// numbers are accepted and converted exactly).
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("degree spec must be a JSON object".into()))?;
        let rho_pairs = parse_mass_pairs(
            obj.get("rho")
                .ok_or_else(|| Error::Malformed("degree spec needs a \"rho\" field".into()))?,
            "rho",
        )?;
        let mut spec = Self::new(rho_pairs)?;
        let lambda = obj.get("lambda");
        let row_weight = obj.get("row_weight");
        if lambda.is_some() && row_weight.is_some() {
            return Err(Error::Malformed(
                "degree spec may carry lambda or row_weight, not both".into(),
            ));
        }
        if let Some(l) = lambda {
            spec = spec.with_lambda(parse_mass_pairs(l, "lambda")?)?;
        }
        if let Some(r) = row_weight {
            let r = r
                .as_u64()
                .ok_or_else(|| Error::Malformed("row_weight must be a positive integer".into()))?;
            spec = spec.with_row_weight(r as usize)?;
        }
        Ok(spec)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("bad JSON: {e}")))?;
        Self::from_json(&value)
    }

    /// Render the JSON wire format with `"num/den"` probabilities.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let rho: Vec<Value> = self
            .rho
            .iter()
            .map(|(d, p)| json!([d, crate::rational::format_rational(p)]))
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("rho".into(), Value::Array(rho));
        match &self.input {
            InputSpec::Lambda(map) => {
                let lambda: Vec<Value> = map
                    .iter()
                    .map(|(j, p)| json!([j, crate::rational::format_rational(p)]))
                    .collect();
                obj.insert("lambda".into(), Value::Array(lambda));
            }
            InputSpec::RowWeight(r) => {
                obj.insert("row_weight".into(), json!(r));
            }
            InputSpec::Unspecified => {}
        }
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }
}

fn parse_mass_pairs(value: &serde_json::Value, what: &str) -> Result<Vec<(usize, Rational)>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::Malformed(format!("{what} must be an array of [degree, mass] pairs")))?;
    let mut out = Vec::with_capacity(arr.len());
    for entry in arr {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Malformed(format!("{what} entries must be [degree, mass] pairs")))?;
        let degree = pair[0]
            .as_u64()
            .ok_or_else(|| Error::Malformed(format!("{what} degree must be a non-negative integer")))?
            as usize;
        let mass = match &pair[1] {
            serde_json::Value::String(s) => parse_rational(s)?,
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    crate::rational::rat_int(i)
                } else {
                    rational_from_f64(n.as_f64().ok_or_else(|| {
                        Error::Malformed(format!("{what} mass {n} is not representable"))
                    })?)?
                }
            }
            other => {
                return Err(Error::Malformed(format!(
                    "{what} mass must be a string or number, got {other}"
                )))
            }
        };
        out.push((degree, mass));
    }
    Ok(out)
}

/// Ideal soliton distribution on `{1, ..., k}`:
/// `rho(1) = 1/k`, `rho(d) = 1/(d(d-1))` for `2 <= d <= k`.
pub fn ideal_soliton(k: usize) -> Result<DegreeSpec> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "ideal soliton needs k >= 2, got {k}"
        )));
    }
    let mut rho = vec![(1usize, rat(1, k as i64))];
    for d in 2..=k {
        rho.push((d, rat(1, (d * (d - 1)) as i64)));
    }
    DegreeSpec::new(rho)
}

/// A sampled LT code: `k` input nodes, `n` output nodes, adjacency in
/// both directions. Equivalent to the `k x n` binary generator matrix
/// with `G[j][i] = 1` iff input `j` is a neighbor of output `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeInstance {
    k: usize,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl CodeInstance {
    /// Build from explicit output adjacency. Neighbor lists are sorted;
    /// duplicates or out-of-range indices are rejected. `n = outputs.len()`
    /// may be zero (a fully erased code), `k` may not.
    pub fn new(k: usize, outputs: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("code needs k >= 1 input nodes".into()));
        }
        let mut out_adj = Vec::with_capacity(outputs.len());
        for (i, mut neighbors) in outputs.into_iter().enumerate() {
            neighbors.sort_unstable();
            if neighbors.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!(
                    "output {i} lists a repeated neighbor"
                )));
            }
            if let Some(&bad) = neighbors.last().filter(|&&v| v >= k) {
                return Err(Error::IndexOutOfRange {
                    what: "output neighbor",
                    index: bad,
                    size: k,
                });
            }
            out_adj.push(neighbors);
        }
        let mut in_adj = vec![Vec::new(); k];
        for (i, neighbors) in out_adj.iter().enumerate() {
            for &j in neighbors {
                in_adj[j].push(i);
            }
        }
        Ok(Self { k, out_adj, in_adj })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    /// Sorted input neighbors of output node `i`.
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    /// Sorted output neighbors of input node `j`.
    pub fn in_neighbors(&self, j: usize) -> &[usize] {
        &self.in_adj[j]
    }

    /// Total number of edges.
    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// Input nodes never chosen by any output. They are unrecoverable by
    /// every decoder, including under the empty erasure pattern.
    pub fn degree_zero_inputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_adj
            .iter()
            .enumerate()
            .filter(|(_, outs)| outs.is_empty())
            .map(|(j, _)| j)
    }

    /// Parse `{"k":, "n":, "outputs": [[...], ...]}`.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("code must be a JSON object".into()))?;
        let k = obj
            .get("k")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Malformed("code needs integer \"k\"".into()))? as usize;
        let n = obj
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Malformed("code needs integer \"n\"".into()))? as usize;
        let outputs_json = obj
            .get("outputs")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Malformed("code needs an \"outputs\" array".into()))?;
        if outputs_json.len() != n {
            return Err(Error::Malformed(format!(
                "code declares n={n} but lists {} outputs",
                outputs_json.len()
            )));
        }
        let mut outputs = Vec::with_capacity(n);
        for entry in outputs_json {
            let list = entry
                .as_array()
                .ok_or_else(|| Error::Malformed("each output must be an array of indices".into()))?;
            let mut neighbors = Vec::with_capacity(list.len());
            for v in list {
                neighbors.push(v.as_u64().ok_or_else(|| {
                    Error::Malformed("output neighbor indices must be integers".into())
                })? as usize);
            }
            outputs.push(neighbors);
        }
        Self::new(k, outputs)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("bad JSON: {e}")))?;
        Self::from_json(&value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "n": self.n(),
            "outputs": self.out_adj,
        })
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    /// SHA-256 of the canonical JSON rendering; used as provenance in
    /// simulation results.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_json_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Exact sampler for an output degree distribution.
///
/// Masses are scaled by their common denominator `D` so a degree draw is
/// a single uniform draw below `D` followed by a cumulative walk — no
/// floating-point quantization of the distribution.
pub struct DegreeSampler {
    // (degree, cumulative integer weight), weights sum to the denominator
    cumulative: Vec<(usize, BigUint)>,
    denominator: BigUint,
    // fast path when the common denominator fits in a machine word
    cumulative_u64: Option<Vec<(usize, u64)>>,
}

impl DegreeSampler {
    pub fn new(spec: &DegreeSpec) -> Self {
        let mut denom = BigInt::one();
        for mass in spec.rho().values() {
            denom = denom.lcm(mass.denom());
        }
        let mut cumulative = Vec::with_capacity(spec.rho().len());
        let mut acc = BigInt::zero();
        for (&d, mass) in spec.rho() {
            acc += mass.numer() * (&denom / mass.denom());
            cumulative.push((d, acc.to_biguint().expect("masses are positive")));
        }
        let denominator = denom.to_biguint().expect("positive lcm");
        debug_assert_eq!(cumulative.last().unwrap().1, denominator);
        let cumulative_u64 = denominator.to_u64().map(|_| {
            cumulative
                .iter()
                .map(|(d, c)| (*d, c.to_u64().expect("bounded by denominator")))
                .collect()
        });
        Self {
            cumulative,
            denominator,
            cumulative_u64,
        }
    }

    /// Draw one degree. Consumes one `uniform below D` draw.
    pub fn draw(&self, rng: &mut impl RngCore) -> usize {
        if let Some(cumulative) = &self.cumulative_u64 {
            let d64 = cumulative.last().expect("rho never empty").1;
            let r = uniform_below_u64(rng, d64);
            for &(degree, cum) in cumulative {
                if r < cum {
                    return degree;
                }
            }
        } else {
            let r = uniform_below_biguint(rng, &self.denominator);
            for (degree, cum) in &self.cumulative {
                if r < *cum {
                    return *degree;
                }
            }
        }
        unreachable!("draw below the total weight always lands in a bucket")
    }
}

/// Sample one code with a caller-provided generator.
///
/// Draw order per output node: one degree draw, then one Floyd subset
/// draw of that size. This order is part of the reproducibility contract.
pub fn sample_code_with_rng(
    k: usize,
    n: usize,
    spec: &DegreeSpec,
    sampler: &DegreeSampler,
    rng: &mut impl RngCore,
) -> Result<CodeInstance> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "sample_code needs k >= 1 and n >= 1, got k={k}, n={n}"
        )));
    }
    if spec.d_max() > k {
        return Err(Error::InvalidArgument(format!(
            "output degree d_max={} exceeds k={k}: an output node cannot have more distinct neighbors than inputs",
            spec.d_max()
        )));
    }
    let mut outputs = Vec::with_capacity(n);
    for _ in 0..n {
        let d = sampler.draw(rng);
        let neighbors = floyd_sample(rng, k, d);
        outputs.push(neighbors.into_iter().collect());
    }
    CodeInstance::new(k, outputs)
}

/// Sample one code: every output node independently draws a degree from
/// `rho` and then a uniformly random subset of distinct inputs.
/// Deterministic for a fixed seed.
pub fn sample_code(k: usize, n: usize, spec: &DegreeSpec, seed: u64) -> Result<CodeInstance> {
    let sampler = DegreeSampler::new(spec);
    let mut rng = seed_rng(seed);
    sample_code_with_rng(k, n, spec, &sampler, &mut rng)
}

/// XOR-encode: `t_i` is the XOR of `x_j` over the neighbors `j` of
/// output `i`.
pub fn encode(code: &CodeInstance, x: &[bool]) -> Result<Vec<bool>> {
    if x.len() != code.k() {
        return Err(Error::LengthMismatch {
            what: "encode input",
            got: x.len(),
            expected: code.k(),
        });
    }
    Ok((0..code.n())
        .map(|i| {
            code.out_neighbors(i)
                .iter()
                .fold(false, |acc, &j| acc ^ x[j])
        })
        .collect())
}

/// The sub-code of surviving (non-erased) output columns, inputs
/// unchanged. This is the submatrix the receiver actually solves
/// against.
pub fn received_submatrix(code: &CodeInstance, pattern: &ErasurePattern) -> Result<CodeInstance> {
    pattern.check_compatible(code)?;
    let outputs: Vec<Vec<usize>> = (0..code.n())
        .filter(|&i| !pattern.contains(i))
        .map(|i| code.out_neighbors(i).to_vec())
        .collect();
    CodeInstance::new(code.k(), outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn degenerate(d: usize) -> DegreeSpec {
        DegreeSpec::new([(d, Rational::one())]).unwrap()
    }

    #[test]
    fn soliton_k4_masses() {
        let spec = ideal_soliton(4).unwrap();
        assert_eq!(spec.rho()[&1], rat(1, 4));
        assert_eq!(spec.rho()[&2], rat(1, 2));
        assert_eq!(spec.rho()[&3], rat(1, 6));
        assert_eq!(spec.rho()[&4], rat(1, 12));
        assert_eq!(spec.d_max(), 4);
    }

    #[test]
    fn soliton_k2_is_half_half() {
        let spec = ideal_soliton(2).unwrap();
        assert_eq!(spec.rho()[&1], rat(1, 2));
        assert_eq!(spec.rho()[&2], rat(1, 2));
    }

    #[test]
    fn soliton_sums_to_one_for_many_k() {
        for k in 2..=40 {
            let spec = ideal_soliton(k).unwrap();
            let total: Rational = spec.rho().values().sum();
            assert!(total.is_one(), "soliton({k}) sums to {total}");
        }
        assert!(ideal_soliton(1).is_err());
    }

    #[test]
    fn spec_rejects_bad_masses() {
        assert!(DegreeSpec::new([(1, rat(1, 2))]).is_err()); // sums to 1/2
        assert!(DegreeSpec::new([(0, Rational::one())]).is_err()); // degree 0
        assert!(DegreeSpec::new(std::iter::empty()).is_err());
        assert!(DegreeSpec::new([(1, rat(3, 2)), (2, rat(-1, 2))]).is_err());
    }

    #[test]
    fn degenerate_degree_one_sampling() {
        // rho = {1: 1}: every output has exactly one neighbor
        let code = sample_code(4, 3, &degenerate(1), 7).unwrap();
        for i in 0..3 {
            assert_eq!(code.out_neighbors(i).len(), 1);
        }
    }

    #[test]
    fn forced_full_degree_sampling() {
        // k=2, rho={2: 1}: the only 2-subset is {0, 1}
        let code = sample_code(2, 1, &degenerate(2), 123).unwrap();
        assert_eq!(code.out_neighbors(0), &[0, 1]);
    }

    #[test]
    fn sampling_is_deterministic_and_guarded() {
        let spec = ideal_soliton(8).unwrap();
        let a = sample_code(8, 12, &spec, 42).unwrap();
        let b = sample_code(8, 12, &spec, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_code(8, 12, &spec, 43).unwrap();
        assert_ne!(a, c);

        // d_max > k rejected
        assert!(sample_code(3, 5, &ideal_soliton(8).unwrap(), 1).is_err());
    }

    #[test]
    fn golden_sample_edge_count() {
        // Frozen at first run; recomputed below by an independent inline
        // re-implementation of the documented RNG contract (one degree
        // draw below the common denominator, then one Floyd draw).
        let spec = ideal_soliton(8).unwrap();
        let code = sample_code(8, 12, &spec, 42).unwrap();
        assert_eq!(code.edge_count(), 33);

        let sampler = DegreeSampler::new(&spec);
        let mut rng = crate::rng::seed_rng(42);
        let mut total = 0usize;
        for _ in 0..12 {
            let d = sampler.draw(&mut rng);
            let subset = crate::rng::floyd_sample(&mut rng, 8, d);
            assert_eq!(subset.len(), d);
            total += d;
        }
        assert_eq!(total, 33);
    }

    #[test]
    fn transpose_consistency() {
        let spec = ideal_soliton(6).unwrap();
        for seed in 0..20 {
            let code = sample_code(6, 9, &spec, seed).unwrap();
            for i in 0..code.n() {
                for &j in code.out_neighbors(i) {
                    assert!(code.in_neighbors(j).contains(&i));
                }
            }
            for j in 0..code.k() {
                for &i in code.in_neighbors(j) {
                    assert!(code.out_neighbors(i).contains(&j));
                }
            }
            let via_in: usize = (0..code.k()).map(|j| code.in_neighbors(j).len()).sum();
            assert_eq!(code.edge_count(), via_in);
        }
    }

    #[test]
    fn sampling_marginals_within_four_sigma() {
        let spec = ideal_soliton(8).unwrap();
        let sampler = DegreeSampler::new(&spec);
        let mut rng = crate::rng::seed_rng(2024);
        let samples = 100_000usize;
        let mut histogram = BTreeMap::new();
        for _ in 0..samples {
            *histogram.entry(sampler.draw(&mut rng)).or_insert(0usize) += 1;
        }
        for (&d, mass) in spec.rho() {
            let p = crate::rational::rational_to_f64(mass);
            let mean = samples as f64 * p;
            let sd = (samples as f64 * p * (1.0 - p)).sqrt();
            let observed = *histogram.get(&d).unwrap_or(&0) as f64;
            assert!(
                (observed - mean).abs() <= 4.0 * sd,
                "degree {d}: observed {observed}, expected {mean} +- {sd}"
            );
        }
    }

    #[test]
    fn encode_identity_and_hand_xor() {
        // identity-like code: out_adj[i] = {i}
        let code = CodeInstance::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        let x = vec![true, false, true];
        assert_eq!(encode(&code, &x).unwrap(), x);

        // k=2, out_adj=[{0},{0,1}], x=(1,1) -> t=(1,0)
        let chain = CodeInstance::new(2, vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(encode(&chain, &[true, true]).unwrap(), vec![true, false]);

        // all-zero input stays all-zero
        let spec = ideal_soliton(5).unwrap();
        let random = sample_code(5, 7, &spec, 3).unwrap();
        assert_eq!(encode(&random, &[false; 5]).unwrap(), vec![false; 7]);

        assert!(encode(&chain, &[true]).is_err());
    }

    #[test]
    fn received_submatrix_drops_erased_columns() {
        let code = CodeInstance::new(3, vec![vec![0], vec![1], vec![0, 2]]).unwrap();
        let none = ErasurePattern::new([], 3).unwrap();
        assert_eq!(received_submatrix(&code, &none).unwrap(), code);

        let middle = ErasurePattern::new([1], 3).unwrap();
        let kept = received_submatrix(&code, &middle).unwrap();
        assert_eq!(kept.n(), 2);
        assert_eq!(kept.out_neighbors(0), &[0]);
        assert_eq!(kept.out_neighbors(1), &[0, 2]);

        let all = ErasurePattern::new([0, 1, 2], 3).unwrap();
        let empty = received_submatrix(&code, &all).unwrap();
        assert_eq!(empty.n(), 0);
        assert_eq!(empty.k(), 3);
    }

    #[test]
    fn code_json_round_trip() {
        let code = CodeInstance::new(3, vec![vec![2, 0], vec![1]]).unwrap();
        let text = code.to_json_string();
        let back = CodeInstance::from_json_str(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.out_neighbors(0), &[0, 2]); // sorted on load

        assert!(CodeInstance::from_json_str(r#"{"k":2,"n":1,"outputs":[[0,0]]}"#).is_err());
        assert!(CodeInstance::from_json_str(r#"{"k":2,"n":2,"outputs":[[0]]}"#).is_err());
        assert!(CodeInstance::from_json_str(r#"{"k":2,"n":1,"outputs":[[5]]}"#).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"rho": [[1, "0.25"], [2, "1/2"], [3, "1/6"], [4, "1/12"]], "lambda": [[1, "1"]]}"#;
        let spec = DegreeSpec::from_json_str(text).unwrap();
        assert_eq!(spec, ideal_soliton(4).unwrap().with_lambda([(1, Rational::one())]).unwrap());
        let back = DegreeSpec::from_json_str(&spec.to_json_string()).unwrap();
        assert_eq!(back, spec);

        let rw = DegreeSpec::from_json_str(r#"{"rho": [[1, "1"]], "row_weight": 2}"#).unwrap();
        assert_eq!(rw.row_weight(), Some(2));
        assert!(DegreeSpec::from_json_str(
            r#"{"rho": [[1, "1"]], "row_weight": 2, "lambda": [[1, "1"]]}"#
        )
        .is_err());
    }

    #[test]
    fn mass_sum_accepts_exact_decimal_spellings() {
        // 0.5 + 0.5 parses to exactly 1
        let spec = DegreeSpec::from_json_str(r#"{"rho": [[1, "0.5"], [2, 0.5]]}"#).unwrap();
        assert_eq!(spec.rho()[&1], rat(1, 2));
    }
}
