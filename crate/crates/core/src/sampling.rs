//! Random decision matrices for end-to-end soundness checks.

use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::Rng;

use crate::decision::{DecisionMatrix, DecisionOption, Outcome, PayoffClass, Utilities};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixShape {
    pub options: RangeInclusive<usize>,
    pub outcomes: RangeInclusive<usize>,
    pub max_denominator: usize,
}

impl Default for MatrixShape {
    fn default() -> Self {
        Self {
            options: 2..=5,
            outcomes: 2..=5,
            max_denominator: 60,
        }
    }
}

/// Positive parts of `total`, `parts` of them, uniform over compositions.
fn composition<R: Rng>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    let mut cuts = sample(rng, total - 1, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts {
        out.push(c + 1 - prev);
        prev = c + 1;
    }
    out.push(total - prev);
    out
}

/// Probabilities `k_j / D` with `D ≤ max_denominator`, random favorable
/// sets and utilities (1, 0).
pub fn random_matrix<T: Scalar, R: Rng>(rng: &mut R, shape: &MatrixShape) -> DecisionMatrix<T> {
    let n = rng.gen_range(shape.options.clone());
    let m = rng.gen_range(shape.outcomes.clone());
    let den = rng.gen_range(m..=shape.max_denominator.max(m));
    let outcomes = composition(rng, den, m)
        .into_iter()
        .enumerate()
        .map(|(j, k)| Outcome {
            label: format!("x{}", j + 1),
            probability: T::from_fraction(k as i64, den as i64),
        })
        .collect();
    let options = (0..n)
        .map(|i| {
            let payoffs = (0..m)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        PayoffClass::Favorable
                    } else {
                        PayoffClass::Unfavorable
                    }
                })
                .collect();
            DecisionOption::new(format!("option {}", i + 1), payoffs)
        })
        .collect();
    DecisionMatrix::new(outcomes, options, Utilities::binary())
}
