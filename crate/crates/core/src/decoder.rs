//! Structural erasure decoding.
//!
//! Over the erasure channel every received symbol is correct, so decoding
//! failure is purely topological: it depends on which output columns
//! survive, never on payload values. This module provides
//!
//! * the peeling decoder (iteratively resolve any surviving output with
//!   exactly one unresolved neighbor),
//! * the maximal uncorrectable set of a pattern — inputs *all* of whose
//!   output neighbors are erased, which no decoder can recover,
//! * stopping-set tests and bounded exhaustive enumeration,
//! * a Gaussian-elimination recoverability oracle (maximum-likelihood
//!   erasure decoding) used to cross-check the peeling decoder.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use rand::RngCore;

use crate::ensemble::CodeInstance;
use crate::error::{Error, Result};
use crate::rng::uniform_below_u64;

/// A set of erased output positions for a code of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    erased: BTreeSet<usize>,
    n: usize,
}

impl ErasurePattern {
    /// Validate indices against the code length `n`.
    pub fn new<I>(erased: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let erased: BTreeSet<usize> = erased.into_iter().collect();
        if let Some(&bad) = erased.iter().next_back().filter(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange {
                what: "erasure pattern",
                index: bad,
                size: n,
            });
        }
        Ok(Self { erased, n })
    }

    /// Pattern from the low `n` bits of a mask (bit `i` set means output
    /// `i` is erased). Handy for exhaustive sweeps.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::Guard(format!("mask patterns support n <= 64, got {n}")));
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::IndexOutOfRange {
                what: "erasure mask",
                index: (63 - mask.leading_zeros()) as usize,
                size: n,
            });
        }
        Ok(Self {
            erased: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
            n,
        })
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.erased.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.erased.contains(&i)
    }

    /// `|e|`, the number of erased outputs.
    pub fn size(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    /// Code length this pattern was built against.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `E(e)`: the number of edge sockets lost with the erased outputs.
    pub fn erased_edge_count(&self, code: &CodeInstance) -> Result<u64> {
        self.check_compatible(code)?;
        Ok(self
            .erased
            .iter()
            .map(|&i| code.out_neighbors(i).len() as u64)
            .sum())
    }

    pub(crate) fn check_compatible(&self, code: &CodeInstance) -> Result<()> {
        if self.n != code.n() {
            return Err(Error::Mismatch(format!(
                "pattern built for n={}, code has n={}",
                self.n,
                code.n()
            )));
        }
        Ok(())
    }
}

/// Result of structural peeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Inputs resolved by peeling.
    pub recovered: BTreeSet<usize>,
    /// Inputs left unresolved (complement of `recovered`).
    pub residual: BTreeSet<usize>,
    /// The maximal uncorrectable set of the pattern: inputs whose every
    /// output neighbor is erased. Always a subset of `residual`.
    pub trivially_uncorrectable: BTreeSet<usize>,
}

/// Stopping sets found by bounded enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingSetReport {
    /// All stopping sets of size `<= max requested`, in ascending
    /// bitmask order.
    pub sets: Vec<BTreeSet<usize>>,
    /// Size of the largest set found; 0 when none exist.
    pub max_size: usize,
}

enum PeelOrder<'a> {
    FirstEligible,
    Random(&'a mut dyn RngCore),
}

fn peel_with_order(
    code: &CodeInstance,
    pattern: &ErasurePattern,
    mut order: PeelOrder<'_>,
) -> Result<DecodeOutcome> {
    pattern.check_compatible(code)?;
    let k = code.k();

    // Surviving outputs, compactly indexed.
    let surviving: Vec<usize> = (0..code.n()).filter(|&i| !pattern.contains(i)).collect();
    let mut unresolved_count: Vec<usize> = surviving
        .iter()
        .map(|&i| code.out_neighbors(i).len())
        .collect();
    // Sum of unresolved neighbor ids; with count == 1 this *is* the id.
    let mut unresolved_sum: Vec<usize> = surviving
        .iter()
        .map(|&i| code.out_neighbors(i).iter().sum())
        .collect();

    // input -> compact indices of surviving outputs touching it
    let mut input_to_surviving: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (c, &i) in surviving.iter().enumerate() {
        for &j in code.out_neighbors(i) {
            input_to_surviving[j].push(c);
        }
    }

    let mut worklist: VecDeque<usize> = (0..surviving.len())
        .filter(|&c| unresolved_count[c] == 1)
        .collect();
    let mut resolved = vec![false; k];

    while !worklist.is_empty() {
        let c = match &mut order {
            PeelOrder::FirstEligible => worklist.pop_front().expect("nonempty"),
            PeelOrder::Random(rng) => {
                let at = uniform_below_u64(rng, worklist.len() as u64) as usize;
                worklist.swap_remove_back(at).expect("nonempty")
            }
        };
        if unresolved_count[c] != 1 {
            continue; // stale entry: its input was resolved through another output
        }
        let v = unresolved_sum[c];
        debug_assert!(!resolved[v]);
        resolved[v] = true;
        for &c2 in &input_to_surviving[v] {
            unresolved_count[c2] -= 1;
            unresolved_sum[c2] -= v;
            if unresolved_count[c2] == 1 {
                worklist.push_back(c2);
            }
        }
    }

    let recovered: BTreeSet<usize> = (0..k).filter(|&j| resolved[j]).collect();
    let residual: BTreeSet<usize> = (0..k).filter(|&j| !resolved[j]).collect();
    let trivially_uncorrectable = maximal_uncorrectable_set(code, pattern)?;
    debug_assert!(trivially_uncorrectable.is_subset(&residual));
    Ok(DecodeOutcome {
        recovered,
        residual,
        trivially_uncorrectable,
    })
}

/// Peel the surviving subgraph: repeatedly resolve a surviving output
/// with exactly one unresolved neighbor until none remains. The residual
/// is independent of the processing order.
pub fn peel_decode(code: &CodeInstance, pattern: &ErasurePattern) -> Result<DecodeOutcome> {
    peel_with_order(code, pattern, PeelOrder::FirstEligible)
}

/// Same as [`peel_decode`] but resolves eligible outputs in an order
/// driven by `rng`. Exists to check confluence: every order must produce
/// the same residual.
pub fn peel_decode_randomized(
    code: &CodeInstance,
    pattern: &ErasurePattern,
    rng: &mut impl RngCore,
) -> Result<DecodeOutcome> {
    peel_with_order(code, pattern, PeelOrder::Random(rng))
}

/// The unique maximal uncorrectable set of a pattern:
/// `U = { v : every output neighbor of v is erased }`.
///
/// Degree-0 inputs have an empty neighborhood, vacuously contained in any
/// pattern, so they belong to `U` for every pattern including the empty
/// one.
pub fn maximal_uncorrectable_set(
    code: &CodeInstance,
    pattern: &ErasurePattern,
) -> Result<BTreeSet<usize>> {
    pattern.check_compatible(code)?;
    Ok((0..code.k())
        .filter(|&j| code.in_neighbors(j).iter().all(|&i| pattern.contains(i)))
        .collect())
}

/// True iff every output adjacent to `subset` touches it at least twice.
/// The empty subset is rejected; emptiness is reported as
/// `max_size == 0` by the enumerator instead.
pub fn is_stopping_set(code: &CodeInstance, subset: &BTreeSet<usize>) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&bad) = subset.iter().next_back().filter(|&&v| v >= code.k()) {
        return Err(Error::IndexOutOfRange {
            what: "stopping-set candidate",
            index: bad,
            size: code.k(),
        });
    }
    for i in 0..code.n() {
        let touches = code
            .out_neighbors(i)
            .iter()
            .filter(|j| subset.contains(j))
            .count();
        if touches == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustively test every nonempty input subset of size `<= max_size`.
/// Guarded at `k <= 24`.
pub fn enumerate_stopping_sets(code: &CodeInstance, max_size: usize) -> Result<StoppingSetReport> {
    let k = code.k();
    if k > 24 {
        return Err(Error::Guard(format!(
            "stopping-set enumeration requires k <= 24, got k={k}"
        )));
    }
    if max_size == 0 || max_size > k {
        return Err(Error::InvalidArgument(format!(
            "max_size must satisfy 1 <= max_size <= k={k}, got {max_size}"
        )));
    }
    let out_masks: Vec<u32> = (0..code.n())
        .map(|i| {
            code.out_neighbors(i)
                .iter()
                .fold(0u32, |m, &j| m | 1 << j)
        })
        .collect();
    let mut sets = Vec::new();
    let mut found_max = 0usize;
    for mask in 1u32..(1u32 << k) {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let stopping = out_masks.iter().all(|&om| {
            let hit = om & mask;
            hit == 0 || hit.count_ones() >= 2
        });
        if stopping {
            found_max = found_max.max(size);
            sets.push((0..k).filter(|&j| mask >> j & 1 == 1).collect());
        }
    }
    Ok(StoppingSetReport {
        sets,
        max_size: found_max,
    })
}

/// Bit-matrix rows over GF(2), `words = ceil(k / 64)`.
fn column_row(code: &CodeInstance, i: usize, words: usize) -> Vec<u64> {
    let mut row = vec![0u64; words];
    for &j in code.out_neighbors(i) {
        row[j / 64] |= 1 << (j % 64);
    }
    row
}

fn row_is_zero(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

fn row_xor(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn lowest_set_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(w_idx, &w)| w_idx * 64 + w.trailing_zeros() as usize)
}

fn row_weight(row: &[u64]) -> u32 {
    row.iter().map(|w| w.count_ones()).sum()
}

/// Inputs whose value is uniquely determined by the surviving linear
/// system over GF(2): input `j` is recoverable iff the `j`-th unit vector
/// lies in the span of the surviving columns' incidence vectors.
///
/// This is the maximum-likelihood erasure-decoding oracle; peeling can
/// never recover more than this set.
pub fn ge_recoverable(code: &CodeInstance, pattern: &ErasurePattern) -> Result<BTreeSet<usize>> {
    pattern.check_compatible(code)?;
    let k = code.k();
    let words = k.div_ceil(64);
    // reduced row echelon basis: (pivot column, row), pivots distinct
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for i in (0..code.n()).filter(|&i| !pattern.contains(i)) {
        let mut row = column_row(code, i, words);
        for (pivot, prow) in &basis {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                row_xor(&mut row, prow);
            }
        }
        if row_is_zero(&row) {
            continue;
        }
        let pivot = lowest_set_bit(&row).expect("nonzero row");
        for (_, existing) in basis.iter_mut() {
            if existing[pivot / 64] >> (pivot % 64) & 1 == 1 {
                row_xor(existing, &row);
            }
        }
        basis.push((pivot, row));
    }
    // In reduced echelon form, the unit vector e_j is in the span iff j
    // pivots a weight-1 row.
    Ok(basis
        .iter()
        .filter(|(_, row)| row_weight(row) == 1)
        .map(|(pivot, _)| *pivot)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{ideal_soliton, sample_code};
    use crate::rng::seed_rng;

    fn chain_code() -> CodeInstance {
        // out_adj = [{0}, {0,1}]
        CodeInstance::new(2, vec![vec![0], vec![0, 1]]).unwrap()
    }

    fn set(vals: &[usize]) -> BTreeSet<usize> {
        vals.iter().copied().collect()
    }

    #[test]
    fn pattern_validation() {
        assert!(ErasurePattern::new([3], 3).is_err());
        let p = ErasurePattern::new([1, 0, 1], 3).unwrap();
        assert_eq!(p.size(), 2);
        assert_eq!(ErasurePattern::from_mask(0b101, 3).unwrap().size(), 2);
        assert!(ErasurePattern::from_mask(0b1000, 3).is_err());
    }

    #[test]
    fn erased_edge_count_matches_adjacency() {
        let code = chain_code();
        let p = ErasurePattern::new([1], 2).unwrap();
        assert_eq!(p.erased_edge_count(&code).unwrap(), 2);
        let all = ErasurePattern::new([0, 1], 2).unwrap();
        assert_eq!(all.erased_edge_count(&code).unwrap(), 3);
        let other = ErasurePattern::new([0], 5).unwrap();
        assert!(other.erased_edge_count(&code).is_err());
    }

    #[test]
    fn peel_chain_fully_recovers() {
        let outcome = peel_decode(&chain_code(), &ErasurePattern::new([], 2).unwrap()).unwrap();
        assert_eq!(outcome.recovered, set(&[0, 1]));
        assert!(outcome.residual.is_empty());
    }

    #[test]
    fn peel_stalls_on_double_output() {
        // only output {0,1} survives: two unresolved neighbors, no peel
        let outcome = peel_decode(&chain_code(), &ErasurePattern::new([0], 2).unwrap()).unwrap();
        assert!(outcome.recovered.is_empty());
        assert_eq!(outcome.residual, set(&[0, 1]));
        assert!(outcome.trivially_uncorrectable.is_empty());
    }

    #[test]
    fn peel_with_everything_erased() {
        let outcome =
            peel_decode(&chain_code(), &ErasurePattern::new([0, 1], 2).unwrap()).unwrap();
        assert_eq!(outcome.residual, set(&[0, 1]));
        assert_eq!(outcome.trivially_uncorrectable, set(&[0, 1]));
    }

    #[test]
    fn maximal_set_on_reconstructed_example() {
        // in_adj[0] = {0,1}, in_adj[3] = {1,2}, inputs 1 and 2 also touch
        // output 3 which survives
        let code = CodeInstance::new(
            4,
            vec![vec![0], vec![0, 3], vec![3], vec![1, 2]],
        )
        .unwrap();
        assert_eq!(code.in_neighbors(0), &[0, 1]);
        assert_eq!(code.in_neighbors(3), &[1, 2]);
        let u = maximal_uncorrectable_set(&code, &ErasurePattern::new([0, 1, 2], 4).unwrap())
            .unwrap();
        assert_eq!(u, set(&[0, 3]));

        // single erased output kills only the input it solely serves
        let u1 = maximal_uncorrectable_set(&code, &ErasurePattern::new([2], 4).unwrap()).unwrap();
        assert!(u1.is_empty()); // input 2 still touches output 3

        let empty =
            maximal_uncorrectable_set(&code, &ErasurePattern::new([], 4).unwrap()).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn sole_neighbor_loss() {
        // output 0 is the sole neighbor of input 2
        let code = CodeInstance::new(3, vec![vec![2], vec![0, 1], vec![0, 1]]).unwrap();
        let u = maximal_uncorrectable_set(&code, &ErasurePattern::new([0], 3).unwrap()).unwrap();
        assert_eq!(u, set(&[2]));
    }

    #[test]
    fn degree_zero_inputs_always_uncorrectable() {
        // input 1 is never chosen
        let code = CodeInstance::new(2, vec![vec![0], vec![0]]).unwrap();
        let u = maximal_uncorrectable_set(&code, &ErasurePattern::new([], 2).unwrap()).unwrap();
        assert_eq!(u, set(&[1]));
        let outcome = peel_decode(&code, &ErasurePattern::new([], 2).unwrap()).unwrap();
        assert_eq!(outcome.residual, set(&[1]));
    }

    #[test]
    fn stopping_set_definition_cases() {
        let double = CodeInstance::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(is_stopping_set(&double, &set(&[0, 1])).unwrap());
        assert!(!is_stopping_set(&double, &set(&[0])).unwrap());

        let chain = chain_code();
        assert!(!is_stopping_set(&chain, &set(&[0, 1])).unwrap());

        assert!(is_stopping_set(&chain, &BTreeSet::new()).is_err());
        assert!(is_stopping_set(&chain, &set(&[7])).is_err());
    }

    #[test]
    fn enumerate_finds_double_edge_set() {
        let double = CodeInstance::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let report = enumerate_stopping_sets(&double, 2).unwrap();
        assert_eq!(report.sets, vec![set(&[0, 1])]);
        assert_eq!(report.max_size, 2);
    }

    #[test]
    fn private_degree_one_outputs_leave_no_stopping_sets() {
        // every input has a private degree-1 output
        let code = CodeInstance::new(3, vec![vec![0], vec![1], vec![2], vec![0, 1, 2]]).unwrap();
        let report = enumerate_stopping_sets(&code, 3).unwrap();
        assert!(report.sets.is_empty());
        assert_eq!(report.max_size, 0);
    }

    #[test]
    fn stopping_sets_closed_under_union() {
        let spec = ideal_soliton(6).unwrap();
        for seed in 0..30 {
            let code = sample_code(6, 8, &spec, seed).unwrap();
            let report = enumerate_stopping_sets(&code, 6).unwrap();
            for a in &report.sets {
                for b in &report.sets {
                    let union: BTreeSet<usize> = a.union(b).copied().collect();
                    assert!(
                        is_stopping_set(&code, &union).unwrap(),
                        "union of stopping sets must be a stopping set"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let code = CodeInstance::new(25, vec![vec![0]]).unwrap();
        assert!(matches!(
            enumerate_stopping_sets(&code, 2),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn ge_oracle_on_chain() {
        let code = chain_code();
        let all = ge_recoverable(&code, &ErasurePattern::new([], 2).unwrap()).unwrap();
        assert_eq!(all, set(&[0, 1]));
        // one equation x0 + x1 determines neither alone
        let none = ge_recoverable(&code, &ErasurePattern::new([0], 2).unwrap()).unwrap();
        assert!(none.is_empty());
        let erased = ge_recoverable(&code, &ErasurePattern::new([0, 1], 2).unwrap()).unwrap();
        assert!(erased.is_empty());
    }

    #[test]
    fn ge_beats_peeling_on_cycles() {
        // outputs {0,1}, {1,2}, {0,2}: rank 2, no degree-1 output.
        // Peeling stalls; GE pins nothing individually (rank 2 < 3).
        let code = CodeInstance::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let e = ErasurePattern::new([], 3).unwrap();
        assert!(ge_recoverable(&code, &e).unwrap().is_empty());
        // add a degree-1 anchor on input 0: now GE solves everything,
        // and so does peeling here
        let anchored =
            CodeInstance::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0]]).unwrap();
        let e4 = ErasurePattern::new([], 4).unwrap();
        assert_eq!(ge_recoverable(&anchored, &e4).unwrap(), set(&[0, 1, 2]));
        assert_eq!(
            peel_decode(&anchored, &e4).unwrap().recovered,
            set(&[0, 1, 2])
        );
    }

    #[test]
    fn confluence_across_random_orders() {
        let spec = ideal_soliton(7).unwrap();
        let mut pattern_rng = seed_rng(99);
        for seed in 0..25 {
            let code = sample_code(7, 10, &spec, seed).unwrap();
            let mask = pattern_rng.next_u64() & ((1 << 10) - 1);
            let pattern = ErasurePattern::from_mask(mask, 10).unwrap();
            let reference = peel_decode(&code, &pattern).unwrap();
            for order_seed in 0..10 {
                let mut rng = seed_rng(1000 + order_seed);
                let randomized = peel_decode_randomized(&code, &pattern, &mut rng).unwrap();
                assert_eq!(randomized.residual, reference.residual);
                assert_eq!(randomized.recovered, reference.recovered);
            }
        }
    }

    #[test]
    fn monotonicity_in_pattern() {
        let spec = ideal_soliton(6).unwrap();
        let mut rng = seed_rng(5);
        for seed in 0..30 {
            let code = sample_code(6, 9, &spec, seed).unwrap();
            let small_mask = rng.next_u64() & 0x1ff;
            let extra = rng.next_u64() & 0x1ff;
            let small = ErasurePattern::from_mask(small_mask, 9).unwrap();
            let large = ErasurePattern::from_mask(small_mask | extra, 9).unwrap();
            let o_small = peel_decode(&code, &small).unwrap();
            let o_large = peel_decode(&code, &large).unwrap();
            assert!(o_small.residual.is_subset(&o_large.residual));
            assert!(o_small
                .trivially_uncorrectable
                .is_subset(&o_large.trivially_uncorrectable));
        }
    }

    #[test]
    fn residual_minus_uncorrectable_is_stopping_set_of_survivors() {
        let spec = ideal_soliton(5).unwrap();
        for seed in 0..20 {
            let code = sample_code(5, 7, &spec, seed).unwrap();
            for mask in 0u64..(1 << 7) {
                let pattern = ErasurePattern::from_mask(mask, 7).unwrap();
                let outcome = peel_decode(&code, &pattern).unwrap();
                let leftover: BTreeSet<usize> = outcome
                    .residual
                    .difference(&outcome.trivially_uncorrectable)
                    .copied()
                    .collect();
                if leftover.is_empty() {
                    continue;
                }
                let survivors = crate::ensemble::received_submatrix(&code, &pattern).unwrap();
                assert!(
                    is_stopping_set(&survivors, &leftover).unwrap(),
                    "seed {seed} mask {mask:b}: residual minus U must stall peeling"
                );
            }
        }
    }
}
