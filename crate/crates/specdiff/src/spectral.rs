//! Periodogram and cross-periodogram kernels.
//!
//! All transforms use the 1-based time convention d(lambda) =
//! sum_{t=1}^{n} x_t exp(-i*lambda*t). The phase factor relative to 0-based
//! indexing cancels in squared moduli and in same-frequency cross products,
//! but 1-based values are what the single-frequency functions return.
//!
//! Two evaluation paths exist for the shared grid lambda_k = 2*pi*k/n1:
//! a reference path by direct summation, and a fast path that folds the
//! series modulo n1 and runs one FFT. The identity behind the fast path is
//! exact: exp(-i*2*pi*k*t/n1) is n1-periodic in t, so summing x over
//! residue classes first changes nothing algebraically. An equivalence test
//! gates the fast path against the reference at 1e-10 relative.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::series::{ComparisonInput, FourierGrid, TimeSeries};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(buf.len());
        fft.process(buf);
    });
}

/// Direct 1-based transform sum_{t=1}^{n} x_t exp(-i*lambda*t).
pub fn dft_sum(x: &[f64], lambda: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &v) in x.iter().enumerate() {
        let (s, c) = (lambda * (j + 1) as f64).sin_cos();
        acc += Complex64::new(c * v, -s * v);
    }
    acc
}

/// Periodogram of raw values: |d(lambda)|^2 / (2*pi*n).
pub fn periodogram_of(x: &[f64], lambda: f64) -> f64 {
    dft_sum(x, lambda).norm_sqr() / (TWO_PI * x.len() as f64)
}

/// Periodogram of a series at one frequency.
pub fn periodogram(x: &TimeSeries, lambda: f64) -> f64 {
    periodogram_of(x.values(), lambda)
}

/// Cross-periodogram of raw values:
/// (1/(2*pi*sqrt(n1*n2))) * d1(lambda) * conj(d2(lambda)).
pub fn cross_periodogram_of(x1: &[f64], x2: &[f64], lambda: f64) -> Complex64 {
    let scale = 1.0 / (TWO_PI * ((x1.len() * x2.len()) as f64).sqrt());
    dft_sum(x1, lambda) * dft_sum(x2, lambda).conj() * scale
}

/// Cross-periodogram of two series at one frequency.
pub fn cross_periodogram(x1: &TimeSeries, x2: &TimeSeries, lambda: f64) -> Complex64 {
    cross_periodogram_of(x1.values(), x2.values(), lambda)
}

/// Periodogram at every grid frequency, by the reference path. The series
/// length may differ from the grid's defining length: this is exactly how
/// the longer series of a comparison is evaluated on the shorter's grid.
pub fn periodogram_on_grid(x: &TimeSeries, grid: &FourierGrid) -> Vec<f64> {
    (1..=grid.len())
        .map(|k| periodogram(x, grid.frequency(k)))
        .collect()
}

/// Periodogram over the full own grid k = 0..n-1 (test helper: these values
/// satisfy Parseval's identity sum_k I(2*pi*k/n) = sum_t x_t^2 / (2*pi)).
pub fn periodogram_full_grid(x: &TimeSeries) -> Vec<f64> {
    let n = x.n();
    let mut buf: Vec<Complex64> = x.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf);
    buf.iter().map(|d| d.norm_sqr() / (TWO_PI * n as f64)).collect()
}

/// Sum x over residue classes of n1 (0-based), the folding step of the fast
/// grid transform.
fn fold(x: &[f64], n1: usize) -> Vec<f64> {
    let mut y = vec![0.0; n1];
    for (j, &v) in x.iter().enumerate() {
        y[j % n1] += v;
    }
    y
}

/// Fast path: d(lambda_k) for k = 1..floor(n1/2) via fold + FFT, including
/// the 1-based phase twiddle so values equal `dft_sum` exactly (up to
/// rounding).
pub fn grid_transform(x: &[f64], n1: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = fold(x, n1)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    fft_in_place(&mut buf);
    (1..=n1 / 2)
        .map(|k| {
            let (s, c) = (TWO_PI * k as f64 / n1 as f64).sin_cos();
            Complex64::new(c, -s) * buf[k]
        })
        .collect()
}

/// Reference path for the same values, direct summation per frequency.
pub fn grid_transform_reference(x: &[f64], n1: usize) -> Vec<Complex64> {
    (1..=n1 / 2)
        .map(|k| dft_sum(x, TWO_PI * k as f64 / n1 as f64))
        .collect()
}

/// Both periodograms and the cross-periodogram of one comparison, evaluated
/// once over the shared grid and reused by every estimator.
///
/// Index j of each vector holds the value at lambda_{j+1} (1-based k).
#[derive(Debug, Clone)]
pub struct ComparisonGrids {
    pub n1: usize,
    pub n2: usize,
    /// I_1(lambda_k), shorter series.
    pub i1: Vec<f64>,
    /// I_2(lambda_k), longer series on the shorter one's grid.
    pub i2: Vec<f64>,
    /// I_12(lambda_k); I_21 is its conjugate.
    pub i12: Vec<Complex64>,
}

impl ComparisonGrids {
    pub fn compute(input: &ComparisonInput) -> Self {
        let n1 = input.n1();
        let n2 = input.n2();
        let d1 = grid_transform(input.short().values(), n1);
        let d2 = grid_transform(input.long().values(), n1);
        let k = n1 / 2;
        let mut i1 = Vec::with_capacity(k);
        let mut i2 = Vec::with_capacity(k);
        let mut i12 = Vec::with_capacity(k);
        let cross_scale = 1.0 / (TWO_PI * ((n1 * n2) as f64).sqrt());
        for j in 0..k {
            i1.push(d1[j].norm_sqr() / (TWO_PI * n1 as f64));
            i2.push(d2[j].norm_sqr() / (TWO_PI * n2 as f64));
            i12.push(d1[j] * d2[j].conj() * cross_scale);
        }
        Self { n1, n2, i1, i2, i12 }
    }

    /// Number of grid frequencies floor(n1/2).
    pub fn len(&self) -> usize {
        self.i1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i1.is_empty()
    }
}
