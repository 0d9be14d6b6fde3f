//! Synthetic volumes: smooth Gaussian random fields plus white noise, and a
//! subjects × conditions design for denoising experiments.
//!
//! One voxel is one millimeter, so FWHM values are given in voxels. Smoothing
//! is a separable Gaussian convolution truncated at 4σ, with no wrap-around
//! at the volume border. Each smoothed sample is then standardized to zero
//! mean and unit variance over the volume.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed::Seed;
use crate::volume::{GridShape, ImageStack, Mask};

/// `σ = FWHM / sqrt(8 ln 2)`.
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (8.0 * std::f64::consts::LN_2).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFieldSpec {
    pub shape: GridShape,
    pub n: usize,
    pub fwhm: f64,
    pub noise_sigma: f64,
    pub seed: Seed,
}

impl SmoothFieldSpec {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidData("sample count must be >= 1".into()));
        }
        check_nonnegative("fwhm", self.fwhm)?;
        check_nonnegative("noise sigma", self.noise_sigma)
    }
}

fn check_nonnegative(what: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::InvalidData(format!("{what} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

/// A signal, its additive noise, and their sum on the same full-grid mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalNoiseStack {
    pub signal: ImageStack,
    pub noise: ImageStack,
    pub combined: ImageStack,
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as usize;
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-0.5 * d * d / (sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    k
}

/// Separable Gaussian smoothing of a row-major grid, in place.
pub fn gaussian_smooth(values: &mut [f64], shape: &GridShape, sigma: f64) {
    assert_eq!(values.len(), shape.n_cells());
    if sigma <= 0.0 {
        return;
    }
    let kernel = gaussian_kernel(sigma);
    let radius = kernel.len() / 2;
    let strides = shape.strides();
    let mut line = Vec::new();
    for axis in 0..shape.ndim() {
        let len = shape.dims()[axis];
        let stride = strides[axis];
        for start in 0..values.len() {
            // visit each line once, from its first cell
            if (start / stride) % len != 0 {
                continue;
            }
            line.clear();
            line.extend((0..len).map(|t| values[start + t * stride]));
            for t in 0..len {
                let lo = t.saturating_sub(radius);
                let hi = (t + radius).min(len - 1);
                let acc: f64 = (lo..=hi)
                    .map(|u| line[u] * kernel[u + radius - t])
                    .sum();
                values[start + t * stride] = acc;
            }
        }
    }
}

fn standardize(values: &mut [f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 0.0 };
    values.iter_mut().for_each(|v| *v = (*v - mean) * scale);
}

fn white_noise(len: usize, sigma: f64, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..len)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// One standardized smooth field over the full grid.
pub fn smooth_field(shape: &GridShape, fwhm: f64, seed: Seed) -> Vec<f64> {
    let mut values = white_noise(shape.n_cells(), 1.0, seed);
    gaussian_smooth(&mut values, shape, fwhm_to_sigma(fwhm));
    standardize(&mut values);
    values
}

fn columns_to_stack(mask: &Mask, columns: Vec<Vec<f64>>) -> Result<ImageStack> {
    let p = mask.n_voxels();
    let n = columns.len();
    let data = Array2::from_shape_fn((p, n), |(v, s)| columns[s][v]);
    ImageStack::new(mask.clone(), data)
}

/// Independent smooth signal and white-noise samples.
pub fn smooth_random_field(spec: &SmoothFieldSpec) -> Result<SignalNoiseStack> {
    spec.validate()?;
    let mask = Mask::full(spec.shape.clone());
    let p = mask.n_voxels();
    let mut signal = Vec::with_capacity(spec.n);
    let mut noise = Vec::with_capacity(spec.n);
    for s in 0..spec.n as u64 {
        signal.push(smooth_field(&spec.shape, spec.fwhm, spec.seed.derive(2 * s)));
        noise.push(white_noise(p, spec.noise_sigma, spec.seed.derive(2 * s + 1)));
    }
    let combined: Vec<Vec<f64>> = signal
        .iter()
        .zip(&noise)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect();
    Ok(SignalNoiseStack {
        signal: columns_to_stack(&mask, signal)?,
        noise: columns_to_stack(&mask, noise)?,
        combined: columns_to_stack(&mask, combined)?,
    })
}

/// Share of the subject variance carried by white noise; the remainder is a
/// smooth subject-specific perturbation shared across conditions.
pub const SUBJECT_WHITE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectConditionSpec {
    pub shape: GridShape,
    pub subjects: usize,
    pub conditions: usize,
    pub fwhm: f64,
    pub subject_sigma: f64,
    pub seed: Seed,
}

impl SubjectConditionSpec {
    /// 10 subjects, 5 conditions, FWHM 8, subject sigma 1.
    pub fn with_defaults(shape: GridShape, seed: Seed) -> Self {
        SubjectConditionSpec {
            shape,
            subjects: 10,
            conditions: 5,
            fwhm: 8.0,
            subject_sigma: 1.0,
            seed,
        }
    }
}

/// Maps for every (subject, condition) pair.
///
/// Column `subject * conditions + condition` holds
/// `signal[condition] + subject_sigma * (sqrt(1 - w) * smooth[subject] + sqrt(w) * white[subject, condition])`
/// with `w =` [`SUBJECT_WHITE_FRACTION`]. Condition signals and subject
/// perturbations are standardized smooth fields, so `subject_sigma²` is the
/// expected between-subject variance at every voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectConditionStack {
    pub stack: ImageStack,
    pub subjects: usize,
    pub conditions: usize,
}

impl SubjectConditionStack {
    pub fn column(&self, subject: usize, condition: usize) -> usize {
        subject * self.conditions + condition
    }
}

pub fn subject_condition_stack(spec: &SubjectConditionSpec) -> Result<SubjectConditionStack> {
    if spec.subjects < 2 || spec.conditions < 1 {
        return Err(Error::InvalidData(
            "need at least 2 subjects and 1 condition".into(),
        ));
    }
    check_nonnegative("fwhm", spec.fwhm)?;
    check_nonnegative("subject sigma", spec.subject_sigma)?;
    let mask = Mask::full(spec.shape.clone());
    let p = mask.n_voxels();
    let (cond_seed, subj_seed, white_seed) = (spec.seed.derive(0), spec.seed.derive(1), spec.seed.derive(2));
    let signals: Vec<Vec<f64>> = (0..spec.conditions as u64)
        .map(|c| smooth_field(&spec.shape, spec.fwhm, cond_seed.derive(c)))
        .collect();
    let smooth_amp = spec.subject_sigma * (1.0 - SUBJECT_WHITE_FRACTION).sqrt();
    let white_amp = spec.subject_sigma * SUBJECT_WHITE_FRACTION.sqrt();
    let mut columns = Vec::with_capacity(spec.subjects * spec.conditions);
    for s in 0..spec.subjects {
        let perturbation = smooth_field(&spec.shape, spec.fwhm, subj_seed.derive(s as u64));
        for (c, signal) in signals.iter().enumerate() {
            let white = white_noise(p, white_amp, white_seed.derive((s * spec.conditions + c) as u64));
            columns.push(
                (0..p)
                    .map(|v| signal[v] + smooth_amp * perturbation[v] + white[v])
                    .collect(),
            );
        }
    }
    Ok(SubjectConditionStack {
        stack: columns_to_stack(&mask, columns)?,
        subjects: spec.subjects,
        conditions: spec.conditions,
    })
}
