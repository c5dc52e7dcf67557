//! Walker's alias method.
//!
//! Vose's two-worklist construction: linear in the number of items, constant
//! time per draw (one slot index, one threshold comparison).

use rand::Rng;

use crate::error::AliasError;

#[derive(Debug, Clone)]
pub struct AliasTable {
    /// Acceptance threshold of each slot, in `[0, 1]`.
    prob: Vec<f64>,
    /// Item returned when a slot's threshold test fails.
    alias: Vec<u32>,
    total_weight: f64,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<AliasTable, AliasError> {
        if weights.is_empty() {
            return Err(AliasError::Empty);
        }
        if weights.len() > u32::MAX as usize {
            return Err(AliasError::InvalidWeight {
                index: u32::MAX as usize,
                weight: f64::NAN,
            });
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(AliasError::InvalidWeight { index, weight });
            }
        }
        let total_weight = compensated_sum(weights);
        if total_weight <= 0.0 {
            return Err(AliasError::AllZero);
        }

        let len = weights.len();
        let scale = len as f64 / total_weight;
        let mut prob: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        // Low-order parts of the residuals of large items, so that a long run
        // of subtractions from one item does not accumulate rounding error.
        let mut low = vec![0.0; len];
        let mut alias: Vec<u32> = (0..len as u32).collect();

        let (mut small, mut large): (Vec<u32>, Vec<u32>) =
            (0..len as u32).partition(|&i| prob[i as usize] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s as usize] = l;
            let (l, s) = (l as usize, s as usize);
            let (give, give_low) = two_sum(1.0, -prob[s]);
            let (hi, lo) = two_sum(prob[l], -give);
            let (hi, lo) = quick_two_sum(hi, lo + low[l] - give_low);
            prob[l] = hi;
            low[l] = lo;
            if hi < 1.0 || (hi == 1.0 && lo < 0.0) {
                prob[l] = hi + lo;
                large.pop();
                small.push(l as u32);
            }
        }
        // Whatever is left is 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i as usize] = 1.0;
            alias[i as usize] = i;
        }

        Ok(AliasTable {
            prob,
            alias,
            total_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let slot = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[slot] {
            slot
        } else {
            self.alias[slot] as usize
        }
    }

    /// Probability of each item as encoded by the slots:
    /// `(1/ℓ)·Σ_slots` of the threshold mass landing on the item.
    pub fn encoded_probabilities(&self) -> Vec<f64> {
        let len = self.prob.len() as f64;
        let mut mass = vec![0.0; self.prob.len()];
        for (slot, (&p, &a)) in self.prob.iter().zip(&self.alias).enumerate() {
            mass[slot] += p / len;
            mass[a as usize] += (1.0 - p) / len;
        }
        mass
    }
}

/// Neumaier summation.
fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// `a + b` as an unevaluated pair `(s, e)` with `s = fl(a + b)`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// [`two_sum`] for `|a| ≥ |b|`.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;

    const TOL: f64 = 1.0 / (1u64 << 40) as f64;

    fn assert_encodes(weights: &[f64]) {
        let table = AliasTable::new(weights).unwrap();
        let total: f64 = weights.iter().sum();
        for (j, (&got, &w)) in table.encoded_probabilities().iter().zip(weights).enumerate() {
            let want = w / total;
            if want == 0.0 {
                assert_eq!(got, 0.0, "item {j}");
            } else {
                assert!(((got - want) / want).abs() <= TOL, "item {j}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn normalizes() {
        let t = AliasTable::new(&[1.0, 1.0, 2.0]).unwrap();
        let p = t.encoded_probabilities();
        for (got, want) in p.iter().zip([0.25, 0.25, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(t.total_weight(), 4.0);
    }

    #[test]
    fn singleton_and_zero_weight() {
        assert_eq!(AliasTable::new(&[5.0]).unwrap().encoded_probabilities(), vec![1.0]);
        let t = AliasTable::new(&[0.0, 3.0]).unwrap();
        assert_eq!(t.encoded_probabilities(), vec![0.0, 1.0]);
        let mut rng = stream_rng(1, Stream::Sampling);
        assert!((0..10_000).all(|_| t.sample(&mut rng) == 1));
    }

    #[test]
    fn rejects_bad_weights() {
        assert_eq!(AliasTable::new(&[]).unwrap_err(), AliasError::Empty);
        assert_eq!(AliasTable::new(&[0.0, 0.0]).unwrap_err(), AliasError::AllZero);
        assert!(matches!(
            AliasTable::new(&[1.0, -1.0]).unwrap_err(),
            AliasError::InvalidWeight { index: 1, .. }
        ));
        assert!(matches!(
            AliasTable::new(&[f64::NAN]).unwrap_err(),
            AliasError::InvalidWeight { index: 0, .. }
        ));
    }

    #[test]
    fn fixed_seed_fixed_draws() {
        let t = AliasTable::new(&[3.0, 1.0, 4.0, 1.0, 5.0]).unwrap();
        let mut a = stream_rng(9, Stream::Sampling);
        let mut b = stream_rng(9, Stream::Sampling);
        let xs: Vec<_> = (0..64).map(|_| t.sample(&mut a)).collect();
        let ys: Vec<_> = (0..64).map(|_| t.sample(&mut b)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn integer_degree_weights() {
        assert_encodes(&[1.0, 100.0, 1.0, 1.0, 7.0, 0.0, 31.0]);
    }

    proptest! {
        #[test]
        fn encoded_mass_matches_weights(weights in prop::collection::vec(0.0f64..1e6, 1..200)) {
            prop_assume!(weights.iter().any(|&w| w > 0.0));
            assert_encodes(&weights);
        }

        #[test]
        fn thresholds_are_probabilities(weights in prop::collection::vec(0.0f64..50.0, 1..100)) {
            prop_assume!(weights.iter().any(|&w| w > 0.0));
            let t = AliasTable::new(&weights).unwrap();
            prop_assert!(t.prob.iter().all(|&p| (0.0..=1.0).contains(&p)));
            prop_assert!(t.alias.iter().all(|&a| (a as usize) < weights.len()));
        }
    }
}
