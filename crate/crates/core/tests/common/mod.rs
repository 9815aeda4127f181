#![allow(dead_code)]

use hornlab_core::rational::{ratio, Rational};
use hornlab_core::{FiniteRelation, QuantileTriple, StepQuantile};
use proptest::prelude::*;

/// `[0, 1]`-valued step quantile with at most `max_pieces` pieces on a grid of sixtieths.
pub fn unit_quantile(max_pieces: usize) -> impl Strategy<Value = StepQuantile> {
    (1..=max_pieces)
        .prop_flat_map(|k| {
            (
                proptest::collection::btree_set(1i64..60, k - 1),
                proptest::collection::vec(0i64..=12, k),
                0i64..=12,
                1i64..=12,
            )
        })
        .prop_map(|(cuts, incs, base, top)| {
            let mut breaks = vec![ratio(0, 1)];
            breaks.extend(cuts.into_iter().map(|c| ratio(c, 60)));
            let total = incs.iter().sum::<i64>() + base;
            let denom = total.max(1) * 12;
            let mut acc = base;
            let values = incs
                .iter()
                .map(|d| {
                    acc += d;
                    ratio(acc * top, denom)
                })
                .collect();
            StepQuantile::new(breaks, values).unwrap()
        })
}

pub fn unit_triple(max_pieces: usize) -> impl Strategy<Value = QuantileTriple> {
    (unit_quantile(max_pieces), unit_quantile(max_pieces), unit_quantile(max_pieces))
        .prop_map(|(a, b, c)| QuantileTriple::new(a, b, c))
}

/// Trace-zero triple: the third component is translated to balance the first two.
pub fn trace_zero_triple(max_pieces: usize) -> impl Strategy<Value = QuantileTriple> {
    unit_triple(max_pieces).prop_map(|q| {
        let shift: Rational = q.q1.integral() + q.q2.integral() - q.q3.integral();
        let q3 = q.q3.pushforward(&ratio(1, 1), &shift);
        QuantileTriple::new(q.q1, q.q2, q3)
    })
}

pub fn relation(max_size: usize) -> impl Strategy<Value = FiniteRelation> {
    (1..=max_size)
        .prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n))
        .prop_map(|likes| FiniteRelation::new(likes, None).unwrap())
}
