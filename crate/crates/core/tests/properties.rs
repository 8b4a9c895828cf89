//! Cross-module invariants, driven by generated inputs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use flan_core::decoder::{ge_recoverable, maximal_uncorrectable_set, peel_decode, ErasurePattern};
use flan_core::ensemble::{encode, received_submatrix, CodeInstance, DegreeSpec};
use flan_core::genpoly::{binomial, output_generating_poly};
use flan_core::poly::SparsePoly2;
use flan_core::rational::{rat, Rational};

fn arb_code() -> impl Strategy<Value = CodeInstance> {
    (1usize..=8).prop_flat_map(|k| {
        prop::collection::vec(0u32..(1u32 << k), 1..=10).prop_map(move |masks| {
            let outputs = masks
                .iter()
                .map(|&m| (0..k).filter(|&j| m >> j & 1 == 1).collect())
                .collect();
            CodeInstance::new(k, outputs).expect("masks are in range")
        })
    })
}

fn arb_code_and_pattern() -> impl Strategy<Value = (CodeInstance, ErasurePattern)> {
    arb_code().prop_flat_map(|code| {
        let n = code.n();
        (Just(code), 0u64..(1u64 << n))
            .prop_map(move |(code, mask)| {
                let pattern = ErasurePattern::from_mask(mask, code.n()).expect("mask fits");
                (code, pattern)
            })
    })
}

fn arb_poly() -> impl Strategy<Value = SparsePoly2> {
    prop::collection::vec(((0u32..5, 0u32..5), -5i64..=5), 0..6).prop_map(|terms| {
        let mut poly = SparsePoly2::zero();
        for ((a, b), c) in terms {
            poly.add_term(a, b, BigInt::from(c));
        }
        poly
    })
}

proptest! {
    #[test]
    fn encode_is_linear(code in arb_code(), seed in any::<u64>()) {
        let k = code.k();
        let x: Vec<bool> = (0..k).map(|j| seed >> j & 1 == 1).collect();
        let y: Vec<bool> = (0..k).map(|j| seed >> (j + 16) & 1 == 1).collect();
        let xy: Vec<bool> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
        let ex = encode(&code, &x).unwrap();
        let ey = encode(&code, &y).unwrap();
        let exy = encode(&code, &xy).unwrap();
        let xored: Vec<bool> = ex.iter().zip(&ey).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(exy, xored);
    }

    #[test]
    fn submatrix_composition((code, pattern) in arb_code_and_pattern(), extra_mask in any::<u64>()) {
        let n = code.n();
        let extra = ErasurePattern::from_mask(
            extra_mask & ((1u64 << n) - 1) & !mask_of(&pattern),
            n,
        ).unwrap();

        // erase pattern, then the re-indexed extra: equals erasing the union
        let first = received_submatrix(&code, &pattern).unwrap();
        let survivors: Vec<usize> = (0..n).filter(|&i| !pattern.contains(i)).collect();
        let reindexed: Vec<usize> = survivors
            .iter()
            .enumerate()
            .filter(|(_, &orig)| extra.contains(orig))
            .map(|(new_idx, _)| new_idx)
            .collect();
        let second = received_submatrix(
            &first,
            &ErasurePattern::new(reindexed, first.n()).unwrap(),
        )
        .unwrap();

        let union: Vec<usize> = (0..n)
            .filter(|&i| pattern.contains(i) || extra.contains(i))
            .collect();
        let direct = received_submatrix(&code, &ErasurePattern::new(union, n).unwrap()).unwrap();
        prop_assert_eq!(second, direct);
    }

    #[test]
    fn decoder_sandwich((code, pattern) in arb_code_and_pattern()) {
        let u = maximal_uncorrectable_set(&code, &pattern).unwrap();
        let ge = ge_recoverable(&code, &pattern).unwrap();
        let outcome = peel_decode(&code, &pattern).unwrap();

        let ge_unrecoverable: BTreeSet<usize> =
            (0..code.k()).filter(|j| !ge.contains(j)).collect();
        prop_assert!(u.is_subset(&ge_unrecoverable), "U must be ML-unrecoverable");
        prop_assert!(
            ge_unrecoverable.is_subset(&outcome.residual),
            "peeling cannot beat maximum likelihood"
        );

        // outcome partition invariants
        let all: BTreeSet<usize> = (0..code.k()).collect();
        let union: BTreeSet<usize> =
            outcome.recovered.union(&outcome.residual).copied().collect();
        prop_assert_eq!(union, all);
        prop_assert!(outcome.recovered.is_disjoint(&outcome.residual));
        prop_assert_eq!(&outcome.trivially_uncorrectable, &u);
    }

    #[test]
    fn poly_convolution_identity(f in arb_poly(), g in arb_poly(), a in 0u32..10, b in 0u32..10) {
        let product = &f * &g;
        let mut convolution = BigInt::from(0);
        for i in 0..=a {
            for j in 0..=b {
                convolution += f.coef(i, j) * g.coef(a - i, b - j);
            }
        }
        prop_assert_eq!(product.coef(a, b), convolution);
    }

    #[test]
    fn edge_slices_normalize_to_binomials(counts in prop::collection::vec(0usize..4, 1..4)) {
        // rho_i = c_i / n over degrees 1..=len, guaranteed integral
        let n: usize = counts.iter().sum::<usize>().max(1);
        let masses: Vec<(usize, Rational)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i + 1, rat(c as i64, n as i64)))
            .collect();
        prop_assume!(!masses.is_empty());
        let spec = DegreeSpec::new(masses).unwrap();
        let poly = output_generating_poly(&spec, n).unwrap();
        for e in 0..=n {
            prop_assert_eq!(
                poly.x_slice_total(e as u32),
                binomial(n as i64, e as i64)
            );
        }
        // total mass over one slice is exactly one
        let total: Rational = flan_core::analysis::edge_distribution(&spec, n, n.min(2))
            .unwrap()
            .values()
            .sum();
        prop_assert!(total.is_one());
    }
}

fn mask_of(pattern: &ErasurePattern) -> u64 {
    pattern.indices().fold(0u64, |m, i| m | 1 << i)
}
