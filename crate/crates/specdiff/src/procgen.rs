//! Process simulation: the five benchmark models, general linear processes,
//! coupled Gaussian innovations for unequal sample sizes, and the
//! deterministic per-replication RNG derivation.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Innovation coupling between a short series (n1) and a long one (n2):
/// innovation t of the short series is correlated (coefficient rho) with
/// innovation m(t) = floor(t*q) - floor(q-1) of the long one, q = n2/n1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    n1: usize,
    n2: usize,
    rho: f64,
}

impl CouplingSpec {
    pub fn new(n1: usize, n2: usize, rho: f64) -> Result<Self> {
        if n1 == 0 || n2 < n1 {
            return Err(Error::InvalidParam(format!(
                "coupling needs 1 <= n1 <= n2, got n1={n1}, n2={n2}"
            )));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParam(format!(
                "coupling correlation must lie in [0,1], got {rho}"
            )));
        }
        let spec = Self { n1, n2, rho };
        // The map is provably strictly increasing for q >= 1, but the
        // contract demands an error rather than silent reindexing if the
        // bounds ever fail.
        let mut prev = 0;
        for t in 1..=n1 {
            let m = spec.index_map(t);
            if m <= prev || m > n2 {
                return Err(Error::InvalidParam(format!(
                    "coupling index map not strictly increasing into 1..={n2} at t={t}"
                )));
            }
            prev = m;
        }
        Ok(spec)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// m(t) = floor(t*n2/n1) - floor((n2-n1)/n1), exact in integers.
    pub fn index_map(&self, t: usize) -> usize {
        t * self.n2 / self.n1 - (self.n2 - self.n1) / self.n1
    }
}

/// Draw one coupled pair of innovation sequences, `pad` extra draws on each
/// side of the in-sample range for moving-average lookback and burn-in.
///
/// Draw order is fixed: the long sequence Z2 first (n2 + 2*pad i.i.d.
/// standard normals), then an independent sequence eps (n1 + 2*pad). The
/// short sequence is Z1_t = rho*Z2_{m(t)} + sqrt(1-rho^2)*eps_t in-sample;
/// pad positions take eps unmixed, since the coupling is defined only for
/// in-sample indices.
pub fn coupled_innovations(
    spec: &CouplingSpec,
    pad: usize,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let z2: Vec<f64> = (0..spec.n2 + 2 * pad)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let eps: Vec<f64> = (0..spec.n1 + 2 * pad)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let mix = (1.0 - spec.rho * spec.rho).sqrt();
    let mut z1 = eps;
    for t in 1..=spec.n1 {
        let i = pad + t - 1;
        z1[i] = spec.rho * z2[pad + spec.index_map(t) - 1] + mix * z1[i];
    }
    (z1, z2)
}

/// Convenience wrapper seeding a fresh generator.
pub fn coupled_innovations_seeded(
    spec: &CouplingSpec,
    pad: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let mut rng = replication_rng(seed, "innovations", 0);
    coupled_innovations(spec, pad, &mut rng)
}

/// Deterministic per-replication generator: the 32-byte ChaCha8 key is the
/// concatenation of the master seed (LE), an FNV-1a hash of the stream name,
/// the replication index (LE), and a fixed tag. Distinct (master, stream,
/// replication) triples give distinct keys, so results never depend on
/// thread scheduling or worker count.
pub fn replication_rng(master_seed: u64, stream: &str, replication: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a64(stream.as_bytes()).to_le_bytes());
    key[16..24].copy_from_slice(&replication.to_le_bytes());
    key[24..32].copy_from_slice(b"SPECDIFF");
    ChaCha8Rng::from_seed(key)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// The process models: the five benchmarks X1..X5 plus explicit linear
/// processes. X1 white noise; X2 AR(1); X3 MA(1); X4 FARIMA(d, 0, theta)
/// via truncated MA(inf) expansion; X5 a structural break (white noise,
/// then an AR(1) stretch on (T/2, 3T/4], then white noise again).
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    WhiteNoise,
    Ar1 { phi: f64 },
    Ma1 { theta: f64 },
    Farima { d: f64, theta: f64, trunc: usize },
    StructuralBreak,
    Linear { psi: Vec<f64> },
}

impl ModelSpec {
    /// Benchmark defaults.
    pub fn x1() -> Self {
        Self::WhiteNoise
    }

    pub fn x2() -> Self {
        Self::Ar1 { phi: -0.8 }
    }

    pub fn x3() -> Self {
        Self::Ma1 { theta: 0.8 }
    }

    pub fn x4() -> Self {
        Self::Farima {
            d: 0.45,
            theta: 0.8,
            trunc: 10_000,
        }
    }

    pub fn x5() -> Self {
        Self::StructuralBreak
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Ar1 { phi } if phi.abs() >= 1.0 => Err(Error::InvalidParam(format!(
                "AR(1) coefficient must satisfy |phi| < 1, got {phi}"
            ))),
            Self::Ma1 { theta } if !theta.is_finite() => Err(Error::InvalidParam(
                "MA(1) coefficient must be finite".into(),
            )),
            Self::Farima { d, trunc, .. } if !(*d > 0.0 && *d < 0.5) => Err(Error::InvalidParam(
                format!("FARIMA memory parameter must lie in (0, 0.5), got {d} (truncation {trunc})"),
            )),
            Self::Farima { trunc: 0, .. } => Err(Error::InvalidParam(
                "FARIMA truncation must be at least 1".into(),
            )),
            Self::Linear { psi } if psi.is_empty() => Err(Error::InvalidParam(
                "linear process needs at least one coefficient".into(),
            )),
            Self::Linear { psi } if psi.iter().any(|c| !c.is_finite()) => Err(
                Error::InvalidParam("linear process coefficients must be finite".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Short display name, used as the default series label.
    pub fn name(&self) -> String {
        match self {
            Self::WhiteNoise => "X1".into(),
            Self::Ar1 { .. } => "X2".into(),
            Self::Ma1 { .. } => "X3".into(),
            Self::Farima { .. } => "X4".into(),
            Self::StructuralBreak => "X5".into(),
            Self::Linear { .. } => "linear".into(),
        }
    }

    /// Innovations required before the first in-sample index.
    pub fn min_lookback(&self) -> usize {
        match self {
            Self::WhiteNoise | Self::Ar1 { .. } | Self::StructuralBreak => 0,
            Self::Ma1 { .. } => 1,
            Self::Farima { trunc, .. } => *trunc,
            Self::Linear { psi } => psi.len().saturating_sub(1),
        }
    }

    /// Padding that makes the output effectively stationary: the AR
    /// recursion gets a 1000-step burn-in (decay 0.8^1000 is far below
    /// machine precision), convolution models get their full lookback.
    pub fn recommended_pad(&self) -> usize {
        match self {
            Self::Ar1 { .. } => 1000,
            _ => self.min_lookback(),
        }
    }

    /// Parse CLI model syntax: a name X1..X5, optionally followed by
    /// parameter overrides, e.g. "X2:phi=-0.5" or "X4:d=0.3,theta=0.6,m=500".
    pub fn parse(text: &str) -> Result<Self> {
        let (name, params) = match text.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (text, None),
        };
        let mut model = match name.to_ascii_uppercase().as_str() {
            "X1" => Self::x1(),
            "X2" => Self::x2(),
            "X3" => Self::x3(),
            "X4" => Self::x4(),
            "X5" => Self::x5(),
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown model '{other}' (expected X1..X5)"
                )))
            }
        };
        if let Some(params) = params {
            for item in params.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| {
                    Error::InvalidParam(format!("malformed model parameter '{item}'"))
                })?;
                let parse_f64 = || {
                    value.parse::<f64>().map_err(|_| {
                        Error::InvalidParam(format!("model parameter {key}={value} is not a number"))
                    })
                };
                match (&mut model, key) {
                    (Self::Ar1 { phi }, "phi") => *phi = parse_f64()?,
                    (Self::Ma1 { theta }, "theta") => *theta = parse_f64()?,
                    (Self::Farima { d, .. }, "d") => *d = parse_f64()?,
                    (Self::Farima { theta, .. }, "theta") => *theta = parse_f64()?,
                    (Self::Farima { trunc, .. }, "m") => {
                        *trunc = value.parse().map_err(|_| {
                            Error::InvalidParam(format!(
                                "model parameter m={value} is not a positive integer"
                            ))
                        })?
                    }
                    _ => {
                        return Err(Error::InvalidParam(format!(
                            "parameter '{key}' does not apply to model {name}"
                        )))
                    }
                }
            }
        }
        model.validate()?;
        Ok(model)
    }
}

/// MA(inf) coefficients of (1-B)^{-d} (1 - theta*B), truncated at lag M:
/// b_0 = 1, b_j = b_{j-1} (j-1+d)/j, psi_j = b_j - theta*b_{j-1}.
pub fn farima_coeffs(d: f64, theta: f64, trunc: usize) -> Result<Vec<f64>> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::InvalidParam(format!(
            "FARIMA memory parameter must lie in (0, 0.5), got {d}"
        )));
    }
    if trunc == 0 {
        return Err(Error::InvalidParam(
            "FARIMA truncation must be at least 1".into(),
        ));
    }
    let mut b = Vec::with_capacity(trunc + 1);
    b.push(1.0);
    for j in 1..=trunc {
        let prev = b[j - 1];
        b.push(prev * (j as f64 - 1.0 + d) / j as f64);
    }
    let mut psi = Vec::with_capacity(trunc + 1);
    psi.push(1.0);
    for j in 1..=trunc {
        psi.push(b[j] - theta * b[j - 1]);
    }
    Ok(psi)
}

/// Generate n observations from `model` driven by `innovations`, which must
/// contain n + 2*pad values for some integer pad >= the model's lookback;
/// the in-sample range is the middle n.
pub fn simulate(model: &ModelSpec, n: usize, innovations: &[f64]) -> Result<TimeSeries> {
    model.validate()?;
    let needed = n + 2 * model.min_lookback();
    if innovations.len() < needed || (innovations.len() - n) % 2 != 0 {
        return Err(Error::InsufficientInnovations {
            needed,
            got: innovations.len(),
        });
    }
    let pad = (innovations.len() - n) / 2;
    let z = innovations;
    let values = match model {
        ModelSpec::WhiteNoise => z[pad..pad + n].to_vec(),
        ModelSpec::Ar1 { phi } => {
            let mut state = 0.0;
            let mut out = Vec::with_capacity(n);
            for (i, &zi) in z.iter().enumerate().take(pad + n) {
                state = phi * state + zi;
                if i >= pad {
                    out.push(state);
                }
            }
            out
        }
        ModelSpec::Ma1 { theta } => (0..n)
            .map(|t| z[pad + t] - theta * z[pad + t - 1])
            .collect(),
        ModelSpec::Farima { d, theta, trunc } => {
            let psi = farima_coeffs(*d, *theta, *trunc)?;
            convolve(&psi, z, pad, n)
        }
        ModelSpec::Linear { psi } => convolve(psi, z, pad, n),
        ModelSpec::StructuralBreak => {
            // Regimes over t = 1..n: white noise up to floor(n/2), AR(1)
            // with coefficient 0.8 on (floor(n/2), floor(3n/4)], white
            // noise after. Half-open intervals; the first regime wins at
            // the shared boundary.
            let b1 = n / 2;
            let b2 = 3 * n / 4;
            let mut out = Vec::with_capacity(n);
            for t in 1..=n {
                let zi = z[pad + t - 1];
                let v = if t <= b1 || t > b2 {
                    zi
                } else {
                    0.8 * out[t - 2] + zi
                };
                out.push(v);
            }
            out
        }
    };
    TimeSeries::new(model.name(), values)
}

fn convolve(psi: &[f64], z: &[f64], pad: usize, n: usize) -> Vec<f64> {
    let look = psi.len() - 1;
    (0..n)
        .map(|t| {
            let start = pad + t - look;
            psi.iter()
                .rev()
                .zip(&z[start..=pad + t])
                .map(|(p, v)| p * v)
                .sum()
        })
        .collect()
}

/// Closed-form spectral density of a stationary model at one frequency.
/// The structural-break model is rejected: it has no spectral density.
pub fn model_spectral_density(model: &ModelSpec, lambda: f64) -> Result<f64> {
    model.validate()?;
    let c = lambda.cos();
    match model {
        ModelSpec::WhiteNoise => Ok(1.0 / TWO_PI),
        ModelSpec::Ar1 { phi } => Ok(1.0 / (TWO_PI * (1.0 - 2.0 * phi * c + phi * phi))),
        ModelSpec::Ma1 { theta } => Ok((1.0 - 2.0 * theta * c + theta * theta) / TWO_PI),
        ModelSpec::Farima { d, theta, .. } => {
            let ma = 1.0 - 2.0 * theta * c + theta * theta;
            let frac = (2.0 - 2.0 * c).powf(-d);
            Ok(ma * frac / TWO_PI)
        }
        ModelSpec::Linear { psi } => {
            let d = crate::spectral::dft_sum(psi, lambda)
                * num_complex::Complex64::from_polar(1.0, lambda);
            // dft_sum is 1-based; the coefficient sum starts at lag 0
            Ok(d.norm_sqr() / TWO_PI)
        }
        ModelSpec::StructuralBreak => Err(Error::Nonstationary(model.name())),
    }
}
