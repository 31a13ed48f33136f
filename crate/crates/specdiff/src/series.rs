//! Core input types: validated series, the shared Fourier grid, and the
//! ordered pair handed to every comparison.

use crate::error::{Error, Result};

/// Minimum series length accepted anywhere. Below this the Fourier grid has
/// fewer than four points and none of the variance estimators mean anything.
pub const MIN_LEN: usize = 8;

/// A labeled, validated sequence of real observations.
///
/// Construction enforces: length >= [`MIN_LEN`], all values finite, and at
/// least two distinct values (a constant series has a degenerate periodogram).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    label: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if values.len() < MIN_LEN {
            return Err(Error::TooShort {
                label,
                n: values.len(),
                min: MIN_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { label, index });
        }
        let first = values[0];
        if values.iter().all(|&v| v == first) {
            return Err(Error::Constant { label });
        }
        Ok(Self { label, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Same observations under a new label.
    pub fn relabeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Subtract the sample mean. The result may be constant-zero only if the
    /// input was constant, which construction already rejects.
    fn centered(&self) -> Self {
        let mean = self.values.iter().sum::<f64>() / self.values.len() as f64;
        Self {
            label: self.label.clone(),
            values: self.values.iter().map(|v| v - mean).collect(),
        }
    }
}

/// The evaluation grid lambda_k = 2*pi*k/n1 for k = 1..floor(n1/2), shared by
/// both series of a comparison. n1 is always the shorter sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    n1: usize,
}

impl FourierGrid {
    pub fn new(n1: usize) -> Result<Self> {
        if n1 < MIN_LEN {
            return Err(Error::InvalidParam(format!(
                "grid size {n1} below minimum {MIN_LEN}"
            )));
        }
        Ok(Self { n1 })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of grid frequencies, floor(n1/2).
    pub fn len(&self) -> usize {
        self.n1 / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// lambda_k for 1-based k in 1..=len().
    pub fn frequency(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.len());
        2.0 * std::f64::consts::PI * k as f64 / self.n1 as f64
    }

    /// All frequencies in increasing order, each in (0, pi].
    pub fn frequencies(&self) -> Vec<f64> {
        (1..=self.len()).map(|k| self.frequency(k)).collect()
    }
}

/// An ordered comparison: `short` is the series whose length defines the
/// grid. When the caller's arguments arrive longer-first they are exchanged
/// and `swapped` records that. Ties keep the caller's order.
#[derive(Debug, Clone)]
pub struct ComparisonInput {
    short: TimeSeries,
    long: TimeSeries,
    swapped: bool,
}

impl ComparisonInput {
    pub fn short(&self) -> &TimeSeries {
        &self.short
    }

    pub fn long(&self) -> &TimeSeries {
        &self.long
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn n1(&self) -> usize {
        self.short.n()
    }

    pub fn n2(&self) -> usize {
        self.long.n()
    }

    /// Sample-size ratio q = n2/n1 >= 1.
    pub fn q(&self) -> f64 {
        self.n2() as f64 / self.n1() as f64
    }

    pub fn grid(&self) -> FourierGrid {
        FourierGrid { n1: self.n1() }
    }
}

/// Order two series shorter-first and optionally subtract each sample mean.
///
/// Centering is recommended for real data: the shorter series' own grid
/// frequencies annihilate its mean exactly, but the longer series is
/// evaluated at frequencies that are generally not Fourier frequencies of
/// its own length, so its mean leaks into every ordinate.
pub fn prepare_comparison(a: &TimeSeries, b: &TimeSeries, center: bool) -> ComparisonInput {
    let swapped = b.n() < a.n();
    let (short, long) = if swapped {
        (b.clone(), a.clone())
    } else {
        (a.clone(), b.clone())
    };
    let (short, long) = if center {
        (short.centered(), long.centered())
    } else {
        (short, long)
    };
    ComparisonInput {
        short,
        long,
        swapped,
    }
}
