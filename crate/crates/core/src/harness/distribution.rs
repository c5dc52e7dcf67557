use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::HarnessError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Exact,
    Empirical { samples: u64 },
}

/// Probability mass per oriented edge, indexed in
/// [`Graph::oriented_edges`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDistribution {
    masses: Vec<f64>,
    counts: Option<Vec<u64>>,
    kind: DistributionKind,
}

impl EdgeDistribution {
    pub fn exact(masses: Vec<f64>) -> Self {
        EdgeDistribution {
            masses,
            counts: None,
            kind: DistributionKind::Exact,
        }
    }

    pub fn uniform(graph: &Graph) -> Self {
        let m = graph.m();
        EdgeDistribution::exact(vec![1.0 / m as f64; m])
    }

    /// Frequencies `counts / Σ counts`.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self, HarnessError> {
        let samples: u64 = counts.iter().sum();
        if samples == 0 {
            return Err(HarnessError::NoSamples);
        }
        let masses = counts.iter().map(|&c| c as f64 / samples as f64).collect();
        Ok(EdgeDistribution {
            masses,
            counts: Some(counts),
            kind: DistributionKind::Empirical { samples },
        })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

fn same_universe(p: &EdgeDistribution, q: &EdgeDistribution) -> Result<(), HarnessError> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(HarnessError::UniverseMismatch(p.len(), q.len()))
    }
}

/// `max_e |P(e) - Q(e)| / Q(e)`: the smallest ε for which `P` is pointwise
/// ε-close to `Q`.
pub fn pointwise_deviation(p: &EdgeDistribution, q: &EdgeDistribution) -> Result<f64, HarnessError> {
    same_universe(p, q)?;
    let mut worst: f64 = 0.0;
    for (i, (&pe, &qe)) in p.masses.iter().zip(&q.masses).enumerate() {
        if qe <= 0.0 {
            return Err(HarnessError::ZeroReferenceMass(i));
        }
        worst = worst.max((pe - qe).abs() / qe);
    }
    Ok(worst)
}

/// Total variation distance, `½ Σ |P(e) - Q(e)|`.
pub fn tvd(p: &EdgeDistribution, q: &EdgeDistribution) -> Result<f64, HarnessError> {
    same_universe(p, q)?;
    Ok(0.5 * p.masses.iter().zip(&q.masses).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `max_e P(e) / min_e P(e)` over edges with positive mass.
pub fn max_min_ratio(p: &EdgeDistribution) -> f64 {
    let max = p.masses.iter().copied().fold(f64::MIN, f64::max);
    let min = p.masses.iter().copied().filter(|&x| x > 0.0).fold(f64::MAX, f64::min);
    max / min
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of observed `counts` against `expected`
/// probabilities. Cells with zero expected mass must have zero counts
/// (otherwise the p-value is 0) and do not count toward the degrees of
/// freedom.
pub fn chi_square(counts: &[u64], expected: &[f64]) -> Result<ChiSquareTest, HarnessError> {
    if counts.len() != expected.len() {
        return Err(HarnessError::UniverseMismatch(counts.len(), expected.len()));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(HarnessError::NoSamples);
    }
    let mut statistic = 0.0;
    let mut cells = 0usize;
    let mut impossible = false;
    for (&c, &p) in counts.iter().zip(expected) {
        if p <= 0.0 {
            impossible |= c > 0;
            continue;
        }
        let e = p * total as f64;
        statistic += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    let degrees_of_freedom = cells.saturating_sub(1);
    let p_value = if impossible {
        0.0
    } else if degrees_of_freedom == 0 {
        1.0
    } else {
        ChiSquared::new(degrees_of_freedom as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    Ok(ChiSquareTest {
        statistic,
        degrees_of_freedom,
        p_value,
    })
}

/// Largest `|count - N·p| / √(N·p(1-p))` over cells with `0 < p < 1`.
pub fn max_binomial_z(counts: &[u64], expected: &[f64]) -> f64 {
    let total = counts.iter().sum::<u64>() as f64;
    counts
        .iter()
        .zip(expected)
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&c, &p)| (c as f64 - total * p).abs() / (total * p * (1.0 - p)).sqrt())
        .fold(0.0, f64::max)
}
