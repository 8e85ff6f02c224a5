//! Seeded toy datasets.
//!
//! Randomness comes from SplitMix64 (state += 0x9E3779B97F4A7C15, then the
//! standard xor-shift-multiply finalizer), seeded with the raw seed as its
//! state. Uniforms are `(next >> 11) · 2⁻⁵³`; normals use the Box-Muller
//! cosine branch `sqrt(−2 ln(1 − u₁)) · cos(2π u₂)`, one normal per two
//! uniforms. Transcendentals go through `libm` so outputs do not depend on
//! the platform math library.
//!
//! Point order is not shuffled: class 0 first, then class 1, and so on.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TwoCircles,
    TwoMoons,
    Blobs,
    Anisotropic,
    VariedBlobs,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::TwoCircles,
        Kind::TwoMoons,
        Kind::Blobs,
        Kind::Anisotropic,
        Kind::VariedBlobs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::TwoCircles => "two_circles",
            Kind::TwoMoons => "two_moons",
            Kind::Blobs => "blobs",
            Kind::Anisotropic => "anisotropic",
            Kind::VariedBlobs => "varied_blobs",
        }
    }

    pub fn classes(self) -> usize {
        match self {
            Kind::TwoCircles | Kind::TwoMoons => 2,
            _ => 3,
        }
    }

    /// Noise used when the caller passes none: the point jitter for circles
    /// and moons, a multiplier on the per-cluster deviations for blobs.
    pub fn default_noise(self) -> f64 {
        match self {
            Kind::TwoCircles | Kind::TwoMoons => 0.05,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

pub const CIRCLE_FACTOR: f64 = 0.5;
pub const CENTER_BOX: (f64, f64) = (-10.0, 10.0);
pub const ANISOTROPIC_TRANSFORM: [[f64; 2]; 2] = [[0.6, -0.6], [-0.4, 0.8]];
pub const VARIED_STDS: [f64; 3] = [1.0, 2.5, 0.5];

/// The fixed construction constants, echoed into metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorDefaults {
    pub rng: &'static str,
    pub normal: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_box: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorMeta {
    pub kind: Kind,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    pub defaults: GeneratorDefaults,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dataset: Dataset,
    pub labels: Option<Vec<usize>>,
    /// Original label strings by label id, when labels came from text.
    pub label_names: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn new(dataset: Dataset, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != dataset.len() {
                return Err(Error::LengthMismatch {
                    left: l.len(),
                    right: dataset.len(),
                });
            }
        }
        Ok(LabeledDataset {
            dataset,
            labels,
            label_names: None,
        })
    }
}

/// SplitMix64 wrapped with the float conversions above.
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(1.0 - u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
    }
}

fn linspace(lo: f64, hi: f64, n: usize, endpoint: bool) -> Vec<f64> {
    let div = if endpoint {
        n.saturating_sub(1).max(1)
    } else {
        n.max(1)
    };
    let step = (hi - lo) / div as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

fn circles(n: usize, noise: f64, rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n_out = n / 2;
    let n_in = n - n_out;
    let tau = 2.0 * std::f64::consts::PI;
    let mut pts = Vec::with_capacity(n);
    for t in linspace(0.0, tau, n_out, false) {
        pts.push(vec![libm::cos(t), libm::sin(t)]);
    }
    for t in linspace(0.0, tau, n_in, false) {
        pts.push(vec![
            CIRCLE_FACTOR * libm::cos(t),
            CIRCLE_FACTOR * libm::sin(t),
        ]);
    }
    jitter(&mut pts, noise, rng);
    (pts, [vec![0; n_out], vec![1; n_in]].concat())
}

fn moons(n: usize, noise: f64, rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n_out = n / 2;
    let n_in = n - n_out;
    let pi = std::f64::consts::PI;
    let mut pts = Vec::with_capacity(n);
    for t in linspace(0.0, pi, n_out, true) {
        pts.push(vec![libm::cos(t), libm::sin(t)]);
    }
    for t in linspace(0.0, pi, n_in, true) {
        pts.push(vec![1.0 - libm::cos(t), 1.0 - libm::sin(t) - 0.5]);
    }
    jitter(&mut pts, noise, rng);
    (pts, [vec![0; n_out], vec![1; n_in]].concat())
}

fn jitter(pts: &mut [Vec<f64>], noise: f64, rng: &mut Rng) {
    if noise > 0.0 {
        for p in pts.iter_mut() {
            for v in p.iter_mut() {
                *v += noise * rng.normal();
            }
        }
    }
}

fn blobs(n: usize, stds: &[f64], rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let k = stds.len();
    let centers: Vec<[f64; 2]> = (0..k)
        .map(|_| {
            let x = rng.uniform_in(CENTER_BOX.0, CENTER_BOX.1);
            let y = rng.uniform_in(CENTER_BOX.0, CENTER_BOX.1);
            [x, y]
        })
        .collect();
    let mut pts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, (center, &std)) in centers.iter().zip(stds).enumerate() {
        let size = n / k + usize::from(c < n % k);
        for _ in 0..size {
            let x = center[0] + std * rng.normal();
            let y = center[1] + std * rng.normal();
            pts.push(vec![x, y]);
            labels.push(c);
        }
    }
    (pts, labels)
}

/// Generate `n` points of the given kind. `noise = None` selects
/// [`Kind::default_noise`].
pub fn generate(
    kind: Kind,
    n: usize,
    noise: Option<f64>,
    seed: u64,
) -> Result<(LabeledDataset, GeneratorMeta)> {
    let noise = noise.unwrap_or(kind.default_noise());
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::param(format!(
            "noise must be finite and non-negative (got {noise})"
        )));
    }
    if n < 2 * kind.classes() {
        return Err(Error::param(format!(
            "{kind} needs at least {} points",
            2 * kind.classes()
        )));
    }
    let mut rng = Rng::new(seed);
    let mut defaults = GeneratorDefaults {
        rng: "splitmix64",
        normal: "box-muller-cos",
        factor: None,
        centers: None,
        center_box: None,
        stds: None,
        transform: None,
    };
    let (pts, labels) = match kind {
        Kind::TwoCircles => {
            defaults.factor = Some(CIRCLE_FACTOR);
            circles(n, noise, &mut rng)
        }
        Kind::TwoMoons => moons(n, noise, &mut rng),
        Kind::Blobs | Kind::Anisotropic | Kind::VariedBlobs => {
            let base: &[f64] = if kind == Kind::VariedBlobs {
                &VARIED_STDS
            } else {
                &[1.0; 3]
            };
            let stds: Vec<f64> = base.iter().map(|s| s * noise).collect();
            defaults.centers = Some(3);
            defaults.center_box = Some(CENTER_BOX);
            defaults.stds = Some(base.to_vec());
            let (mut pts, labels) = blobs(n, &stds, &mut rng);
            if kind == Kind::Anisotropic {
                let t = ANISOTROPIC_TRANSFORM;
                defaults.transform = Some(t);
                for p in &mut pts {
                    let (x, y) = (p[0], p[1]);
                    p[0] = x * t[0][0] + y * t[1][0];
                    p[1] = x * t[0][1] + y * t[1][1];
                }
            }
            (pts, labels)
        }
    };
    let ds = LabeledDataset::new(Dataset::new(pts)?, Some(labels))?;
    Ok((
        ds,
        GeneratorMeta {
            kind,
            n,
            noise,
            seed,
            defaults,
        },
    ))
}
