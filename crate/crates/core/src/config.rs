use crate::error::{Error, Result};

/// Comparison used to admit an edge against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeRule {
    /// `|r| >= lambda`.
    #[default]
    AtLeast,
    /// `|r| > lambda`; the support of the soft-thresholded matrix.
    Greater,
}

impl EdgeRule {
    #[inline]
    pub fn admits(self, value: f64, lambda: f64) -> bool {
        match self {
            EdgeRule::AtLeast => value >= lambda,
            EdgeRule::Greater => value > lambda,
        }
    }
}

/// Threshold, comparison rule and tie-breaking seed for edge selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub lambda: f64,
    pub rule: EdgeRule,
    pub seed: u64,
}

impl SelectionConfig {
    pub fn new(lambda: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            lambda,
            rule: EdgeRule::AtLeast,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The calibrated default `lambda = 1/n`.
    pub fn for_sample_size(n: usize, seed: u64) -> Self {
        Self {
            lambda: 1.0 / n as f64,
            rule: EdgeRule::AtLeast,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::NegativeLambda(self.lambda));
        }
        Ok(())
    }
}
