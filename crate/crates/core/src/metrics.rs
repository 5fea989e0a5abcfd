//! Measurements on belief vectors.

use crate::error::{Error, Result};
use crate::oracle::universal_observer;
use crate::stimuli::ExternalField;

/// Mean absolute belief.
pub fn radicalization(beliefs: &[f64]) -> Result<f64> {
    if beliefs.is_empty() {
        return Err(Error::Empty("radicalization of an empty belief vector".into()));
    }
    Ok(beliefs.iter().map(|b| b.abs()).sum::<f64>() / beliefs.len() as f64)
}

/// Population standard deviation of the beliefs of one trial.
pub fn polarization(beliefs: &[f64]) -> Result<f64> {
    if beliefs.len() < 2 {
        return Err(Error::Empty("polarization needs at least two nodes".into()));
    }
    let n = beliefs.len() as f64;
    let mean = beliefs.iter().sum::<f64>() / n;
    let var = beliefs.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Fraction of nodes whose belief has the sign `true_sign`; zero beliefs are incorrect.
pub fn choice_accuracy(beliefs: &[f64], true_sign: i8) -> Result<f64> {
    if true_sign != 1 && true_sign != -1 {
        return Err(Error::InvalidParameter(format!("true sign must be +1 or -1, got {true_sign}")));
    }
    if beliefs.is_empty() {
        return Ok(0.0);
    }
    let s = f64::from(true_sign);
    Ok(beliefs.iter().filter(|&&b| b * s > 0.0).count() as f64 / beliefs.len() as f64)
}

/// Fraction of nodes more confident than the universal observer.
pub fn overconfidence_fraction(beliefs: &[f64], b_univ: f64) -> f64 {
    if beliefs.is_empty() {
        return 0.0;
    }
    let bound = b_univ.abs();
    beliefs.iter().filter(|b| b.abs() > bound).count() as f64 / beliefs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub radicalization: f64,
    pub polarization: f64,
    pub pct_correct: f64,
    pub frac_overconfident: f64,
    pub b_univ: f64,
}

impl TrialMetrics {
    /// Accuracy is scored against `true_sign`, or against the sign of the
    /// universal observer when no ground truth exists (uninformative trials).
    pub fn compute(beliefs: &[f64], field: &ExternalField, true_sign: Option<i8>) -> Result<Self> {
        let b_univ = universal_observer(field);
        let reference = true_sign.unwrap_or(if b_univ >= 0.0 { 1 } else { -1 });
        Ok(Self {
            radicalization: radicalization(beliefs)?,
            polarization: polarization(beliefs)?,
            pct_correct: choice_accuracy(beliefs, reference)?,
            frac_overconfident: overconfidence_fraction(beliefs, b_univ),
            b_univ,
        })
    }
}

/// Closed degree interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeBand {
    pub lo: usize,
    pub hi: usize,
}

impl DegreeBand {
    pub fn contains(&self, degree: usize) -> bool {
        (self.lo..=self.hi).contains(&degree)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefHistogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl BeliefHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + w * bin as f64, self.lo + w * (bin + 1) as f64)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Moving average over `window` bins centred on each bin, truncated at the ends.
    pub fn smoothed(&self, window: usize) -> Vec<f64> {
        let half = window / 2;
        let n = self.counts.len();
        (0..n)
            .map(|i| {
                let a = i.saturating_sub(half);
                let b = (i + half).min(n - 1);
                self.counts[a..=b].iter().sum::<u64>() as f64 / (b - a + 1) as f64
            })
            .collect()
    }

    /// Number of local maxima (plateaus count once) of the 5-bin smoothed
    /// histogram whose height reaches `min_relative_height` of the tallest bin.
    pub fn mode_count(&self, min_relative_height: f64) -> usize {
        count_modes(&self.smoothed(5), min_relative_height)
    }
}

/// Relative height below which smoothed bumps are not counted as modes.
pub const DEFAULT_MODE_THRESHOLD: f64 = 0.05;

pub(crate) fn count_modes(values: &[f64], min_relative_height: f64) -> usize {
    let peak = values.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0;
    }
    let floor = min_relative_height * peak;
    let n = values.len();
    let mut modes = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let left_lower = i == 0 || values[i - 1] < values[i];
        let right_lower = j + 1 == n || values[j + 1] < values[i];
        if left_lower && right_lower && values[i] >= floor {
            modes += 1;
        }
        i = j + 1;
    }
    modes
}

/// Pooled histogram over trials.
///
/// With `range = None` the bins span `[-m, m]`, `m` the largest absolute
/// selected belief. With a degree band, only nodes whose degree falls in the
/// band are pooled.
pub fn belief_histogram(
    belief_sets: &[Vec<f64>],
    bins: usize,
    range: Option<(f64, f64)>,
    degree_band: Option<(&[usize], DegreeBand)>,
) -> Result<BeliefHistogram> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("histogram needs at least 2 bins, got {bins}")));
    }
    let selected: Vec<f64> = belief_sets
        .iter()
        .flat_map(|set| {
            set.iter().enumerate().filter_map(move |(v, &b)| match degree_band {
                Some((degrees, band)) => band.contains(degrees[v]).then_some(b),
                None => Some(b),
            })
        })
        .collect();
    if selected.is_empty() {
        return Err(Error::Empty("no beliefs selected for the histogram".into()));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) if hi > lo => (lo, hi),
        Some((lo, hi)) => return Err(Error::InvalidParameter(format!("empty histogram range [{lo}, {hi}]"))),
        None => {
            let m = selected.iter().map(|b| b.abs()).fold(0.0, f64::max);
            let m = if m > 0.0 { m } else { 1.0 };
            (-m, m)
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for b in selected {
        if b < lo || b > hi {
            continue;
        }
        let k = (((b - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(BeliefHistogram { lo, hi, counts })
}

/// Spearman rank correlation (average ranks for ties). `None` when either
/// variable is constant or the inputs are shorter than two.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&ranks(x), &ranks(y))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
