//! External-message fields: zero-mean "uninformative" noise and sparse,
//! biased "informative" evidence.

use rand::seq::index;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::seed;

/// Mean magnitude of an informative external message.
pub const INFORMATIVE_MEAN: f64 = 0.05;
/// Standard deviation of an informative external message.
pub const INFORMATIVE_SD: f64 = 0.05;

/// Per-node external messages `M_ext->i` in log-odds units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalField {
    values: Vec<f64>,
    informed: Vec<bool>,
}

impl ExternalField {
    /// Field from raw values; a node counts as informed when its value is nonzero.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("external message {v} at node {i} is not finite")));
        }
        let informed = values.iter().map(|&v| v != 0.0).collect();
        Ok(Self { values, informed })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            informed: vec![false; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn informed_mask(&self) -> &[bool] {
        &self.informed
    }

    pub fn informed_count(&self) -> usize {
        self.informed.iter().filter(|&&b| b).count()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The field with every value negated.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
            informed: self.informed.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StimulusSpec {
    Uninformative { sigma_ext: f64 },
    Informative { informed: usize, sign: i8 },
}

impl StimulusSpec {
    pub fn generate(&self, n: usize, seed: u64) -> Result<ExternalField> {
        match *self {
            StimulusSpec::Uninformative { sigma_ext } => uninformative_field(n, sigma_ext, seed),
            StimulusSpec::Informative { informed, sign } => informative_field(n, informed, sign, seed),
        }
    }
}

/// Every node gets an i.i.d. `Normal(0, sigma_ext^2)` message.
pub fn uninformative_field(n: usize, sigma_ext: f64, seed: u64) -> Result<ExternalField> {
    if !(sigma_ext.is_finite() && sigma_ext > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_ext must be positive, got {sigma_ext}")));
    }
    let normal = Normal::new(0.0, sigma_ext).expect("validated sigma");
    let mut rng = seed::rng(seed);
    let values = (0..n).map(|_| normal.sample(&mut rng)).collect();
    Ok(ExternalField {
        values,
        informed: vec![true; n],
    })
}

/// `informed` distinct nodes drawn uniformly receive `Normal(sign * 0.05, 0.05^2)`;
/// every other node gets exactly zero.
pub fn informative_field(n: usize, informed: usize, sign: i8, seed: u64) -> Result<ExternalField> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("bias sign must be +1 or -1, got {sign}")));
    }
    if informed == 0 || informed > n {
        return Err(Error::InvalidParameter(format!(
            "informed node count {informed} must lie in 1..={n}"
        )));
    }
    let normal = Normal::new(f64::from(sign) * INFORMATIVE_MEAN, INFORMATIVE_SD).expect("constant parameters");
    let mut rng = seed::rng(seed);
    let mut chosen = index::sample(&mut rng, n, informed).into_vec();
    chosen.sort_unstable();
    let mut values = vec![0.0; n];
    let mut mask = vec![false; n];
    for node in chosen {
        values[node] = normal.sample(&mut rng);
        mask[node] = true;
    }
    Ok(ExternalField { values, informed: mask })
}

/// Informed node count for a percentage of `n`: zero for 0%, otherwise at
/// least one node.
pub fn informed_count_for_percent(n: usize, percent: f64) -> usize {
    if percent <= 0.0 || n == 0 {
        return 0;
    }
    ((percent / 100.0 * n as f64).round() as usize).clamp(1, n)
}
