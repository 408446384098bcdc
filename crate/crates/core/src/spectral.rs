//! Magnitude spectra, per-bin dominant frequencies and bucket hashing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// One-sided magnitude spectrum of a real window, indices `0..=W/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    pub magnitudes: Vec<f64>,
    /// Width of one FFT bin, `f_s / W`.
    pub resolution_hz: f64,
    /// Upper bound on the magnitude of rounding noise for this window.
    /// Magnitudes at or below it count as zero when picking peaks.
    pub noise_floor: f64,
}

impl FrequencySpectrum {
    pub fn window_size(&self) -> usize {
        2 * (self.magnitudes.len() - 1)
    }
}

/// Precomputed radix-2 FFT for one power-of-two size.
#[derive(Debug, Clone)]
pub struct Fft {
    size: usize,
    twiddles: Vec<(f64, f64)>,
    bit_reverse: Vec<usize>,
}

impl Fft {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::BadWindowSize(size));
        }
        let bits = size.trailing_zeros();
        let bit_reverse = (0..size)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let twiddles = (0..size / 2)
            .map(|k| {
                let (s, c) = math::sin_cos(-2.0 * PI * k as f64 / size as f64);
                (c, s)
            })
            .collect();
        Ok(Self {
            size,
            twiddles,
            bit_reverse,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// In-place forward transform of `(re, im)` pairs.
    pub fn transform(&self, re: &mut [f64], im: &mut [f64]) {
        let n = self.size;
        assert!(re.len() == n && im.len() == n, "buffer length must equal FFT size");
        for i in 0..n {
            let j = self.bit_reverse[i];
            if i < j {
                re.swap(i, j);
                im.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let (wr, wi) = self.twiddles[k * step];
                    let a = start + k;
                    let b = a + half;
                    let tr = re[b] * wr - im[b] * wi;
                    let ti = re[b] * wi + im[b] * wr;
                    re[b] = re[a] - tr;
                    im[b] = im[a] - ti;
                    re[a] += tr;
                    im[a] += ti;
                }
            }
            len <<= 1;
        }
    }

    /// One-sided magnitudes of a real input of length `size`.
    pub fn magnitudes(&self, input: &[f64]) -> Vec<f64> {
        let mut re = input.to_vec();
        let mut im = vec![0.0; self.size];
        self.transform(&mut re, &mut im);
        (0..=self.size / 2)
            .map(|k| math::hypot(re[k], im[k]))
            .collect()
    }
}

/// Turns window axes into spectra, reusing one FFT plan.
#[derive(Debug, Clone)]
pub struct SpectrumAnalyzer {
    fft: Option<Fft>,
    size: usize,
    sampling_hz: f64,
}

impl SpectrumAnalyzer {
    pub fn new(window_size: usize, sampling_hz: f64) -> Result<Self> {
        if window_size < 8 || window_size % 2 == 1 {
            return Err(Error::BadWindowSize(window_size));
        }
        if !(sampling_hz.is_finite() && sampling_hz > 0.0) {
            return Err(Error::BadSamplingRate(sampling_hz));
        }
        let fft = if window_size.is_power_of_two() {
            Some(Fft::new(window_size)?)
        } else {
            None
        };
        Ok(Self {
            fft,
            size: window_size,
            sampling_hz,
        })
    }

    pub fn window_size(&self) -> usize {
        self.size
    }

    pub fn spectrum(&self, axis: &[f64]) -> Result<FrequencySpectrum> {
        if axis.len() != self.size {
            return Err(Error::BadWindowSize(axis.len()));
        }
        let magnitudes = match &self.fft {
            Some(fft) => fft.magnitudes(axis),
            None => direct_dft_magnitudes(axis),
        };
        let peak = axis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(FrequencySpectrum {
            magnitudes,
            resolution_hz: self.sampling_hz / self.size as f64,
            noise_floor: 1e-9 * peak * self.size as f64,
        })
    }
}

/// Quadratic transform for sizes the radix-2 plan cannot handle.
pub(crate) fn direct_dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let phase = ((k * t) % n) as f64 * 2.0 * PI / n as f64;
                let (s, c) = math::sin_cos(phase);
                re += v * c;
                im -= v * s;
            }
            math::hypot(re, im)
        })
        .collect()
}

/// One-sided magnitude spectrum of a single window axis.
pub fn dft(axis: &[f64], sampling_hz: f64) -> Result<FrequencySpectrum> {
    SpectrumAnalyzer::new(axis.len(), sampling_hz)?.spectrum(axis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominantFrequencies {
    pub values_hz: Vec<f64>,
    /// FFT index each value came from.
    pub indices: Vec<usize>,
    pub bin_edges_hz: Vec<f64>,
}

/// FFT index range `(first, last)` of each of `bins` equal-width bins over
/// `(0, f_s/2]`; an index `k` belongs to bin `i` iff
/// `i*W/(2g) < k <= (i+1)*W/(2g)`.
pub fn bin_index_ranges(window_size: usize, bins: usize) -> Result<Vec<(usize, usize)>> {
    let half = window_size / 2;
    if bins == 0 || bins > half {
        return Err(Error::BadBinCount {
            bins,
            max: half,
        });
    }
    Ok((0..bins)
        .map(|i| {
            // smallest k with 2gk > iW, largest k with 2gk <= (i+1)W
            let first = i * window_size / (2 * bins) + 1;
            let last = (i + 1) * window_size / (2 * bins);
            (first, last)
        })
        .collect())
}

/// Frequency of the largest magnitude in each of `bins` equal-width bins,
/// DC excluded. Ties and all-zero bins resolve to the lowest frequency.
pub fn dominant_frequencies(
    spectrum: &FrequencySpectrum,
    bins: usize,
    sampling_hz: f64,
) -> Result<DominantFrequencies> {
    let w = spectrum.window_size();
    let ranges = bin_index_ranges(w, bins)?;
    let floor = spectrum.noise_floor;
    let mut indices = Vec::with_capacity(bins);
    for &(first, last) in &ranges {
        let mut best = first;
        let mut best_mag = spectrum.magnitudes[first];
        for k in first + 1..=last {
            // a later index only wins by clearing the noise floor
            let m = spectrum.magnitudes[k];
            if m > best_mag + floor {
                best = k;
                best_mag = m;
            }
        }
        if best_mag <= floor {
            best = first;
        }
        indices.push(best);
    }
    let resolution = sampling_hz / w as f64;
    let bin_edges_hz = (0..=bins)
        .map(|i| i as f64 * sampling_hz / (2 * bins) as f64)
        .collect();
    Ok(DominantFrequencies {
        values_hz: indices.iter().map(|&k| k as f64 * resolution).collect(),
        indices,
        bin_edges_hz,
    })
}

/// The nine bucket hash functions `H0..H8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HashFunction {
    H0,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
}

impl HashFunction {
    pub const ALL: [Self; 9] = [
        Self::H0,
        Self::H1,
        Self::H2,
        Self::H3,
        Self::H4,
        Self::H5,
        Self::H6,
        Self::H7,
        Self::H8,
    ];
}

impl fmt::Display for HashFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for HashFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|h| format!("{h:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown hash function {s:?}")))
    }
}

/// A hash function bound to the sampling rate, window size and bin count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashSpec {
    pub function: HashFunction,
    pub sampling_hz: f64,
    pub window_size: usize,
    pub bins: usize,
}

impl HashSpec {
    pub fn new(
        function: HashFunction,
        sampling_hz: f64,
        window_size: usize,
        bins: usize,
    ) -> Result<Self> {
        if !(sampling_hz.is_finite() && sampling_hz > 0.0) {
            return Err(Error::BadSamplingRate(sampling_hz));
        }
        if window_size < 8 || window_size % 2 == 1 {
            return Err(Error::BadWindowSize(window_size));
        }
        bin_index_ranges(window_size, bins)?;
        let spec = Self {
            function,
            sampling_hz,
            window_size,
            bins,
        };
        if spec.modulus() < 1 {
            return Err(Error::InvalidParameter(format!(
                "{function} has no buckets at f_s = {sampling_hz} Hz"
            )));
        }
        Ok(spec)
    }

    /// `ceil(f_s / 2g)`, the modulus shared by H0..H3.
    fn band_modulus(&self) -> i64 {
        math::ceil(self.sampling_hz / (2 * self.bins) as f64) as i64
    }

    /// The `mod` operand of the formula.
    fn modulus(&self) -> i64 {
        let fs = self.sampling_hz;
        let w = self.window_size as f64;
        match self.function {
            HashFunction::H0 | HashFunction::H1 | HashFunction::H2 | HashFunction::H3 => {
                self.band_modulus()
            }
            HashFunction::H4 => math::round(fs / 4.0) as i64,
            HashFunction::H5 => math::round(fs / 2.0) as i64,
            HashFunction::H6 => self.window_size as i64,
            HashFunction::H7 => math::round(w / 2.0) as i64,
            HashFunction::H8 => math::round(w / 3.0) as i64,
        }
    }

    /// Scale applied to the reduced value by H0..H3.
    fn band_scale(&self, reduced: f64) -> f64 {
        let g = self.bins as f64;
        let fs = self.sampling_hz;
        match self.function {
            HashFunction::H0 => 8.0 * g * reduced / fs,
            HashFunction::H1 => g * reduced / (fs / (2.0 * g)),
            HashFunction::H2 => 6.0 * g * reduced / fs,
            HashFunction::H3 => 4.0 * g * reduced / fs,
            _ => reduced,
        }
    }

    /// Number of buckets `h`; every output lies in `[0, h)`.
    pub fn bucket_count(&self) -> u32 {
        match self.function {
            HashFunction::H0 | HashFunction::H1 | HashFunction::H2 | HashFunction::H3 => {
                // outputs are monotone in the reduced value, so the largest is at c - 1
                let top = (self.band_modulus() - 1) as f64;
                math::floor(self.band_scale(top)) as u32 + 1
            }
            _ => self.modulus() as u32,
        }
    }

    /// Width in Hz of the frequency interval that maps onto one bucket step.
    pub fn bucket_width(&self) -> f64 {
        let fs = self.sampling_hz;
        let g = self.bins as f64;
        let w = self.window_size as f64;
        match self.function {
            HashFunction::H0 => fs / (8.0 * g),
            HashFunction::H1 => fs / (2.0 * g * g),
            HashFunction::H2 => fs / (6.0 * g),
            HashFunction::H3 => fs / (4.0 * g),
            HashFunction::H4 => 2.0,
            HashFunction::H5 => 1.0,
            HashFunction::H6 => fs / (2.0 * w),
            HashFunction::H7 => fs / w,
            HashFunction::H8 => 3.0 * fs / (2.0 * w),
        }
    }
}

/// Maps one frequency to its bucket.
pub fn hash_frequency(v: f64, spec: &HashSpec) -> Result<u32> {
    if !v.is_finite() {
        return Err(Error::NonFiniteFrequency);
    }
    if v < 0.0 {
        return Err(Error::NegativeFrequency(v));
    }
    let fs = spec.sampling_hz;
    let w = spec.window_size as f64;
    let modulus = spec.modulus();
    let bucket = match spec.function {
        HashFunction::H0 | HashFunction::H1 | HashFunction::H2 | HashFunction::H3 => {
            let reduced = (math::round(v) as i64).rem_euclid(modulus) as f64;
            math::floor(spec.band_scale(reduced)) as i64
        }
        HashFunction::H4 => (math::round(v / 2.0) as i64).rem_euclid(modulus),
        HashFunction::H5 => (math::round(v) as i64).rem_euclid(modulus),
        HashFunction::H6 => (math::round(2.0 * v * w / fs) as i64).rem_euclid(modulus),
        HashFunction::H7 => (math::round(v * w / fs) as i64).rem_euclid(modulus),
        HashFunction::H8 => (math::round(2.0 * v * w / (3.0 * fs)) as i64).rem_euclid(modulus),
    };
    Ok(bucket as u32)
}

/// Hashes each per-bin dominant frequency.
pub fn hash_tuple(df: &DominantFrequencies, spec: &HashSpec) -> Result<Vec<u32>> {
    if df.values_hz.len() != spec.bins {
        return Err(Error::ShapeMismatch(format!(
            "{} dominant frequencies for {} bins",
            df.values_hz.len(),
            spec.bins
        )));
    }
    df.values_hz.iter().map(|&v| hash_frequency(v, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(w: usize, index: usize, amp: f64) -> Vec<f64> {
        (0..w)
            .map(|t| amp * libm::sin(2.0 * PI * (index * t) as f64 / w as f64))
            .collect()
    }

    fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    #[test]
    fn dc_only_signal() {
        let s = dft(&[1.5; 8], 50.0).unwrap();
        assert!((s.magnitudes[0] - 12.0).abs() < 1e-12);
        assert!(s.magnitudes[1..].iter().all(|m| m.abs() < 1e-12));
        assert_eq!(s.magnitudes.len(), 5);
    }

    #[test]
    fn pure_tone_lands_in_its_index() {
        let s = dft(&tone(8, 2, 1.0), 50.0).unwrap();
        assert!((s.magnitudes[2] - 4.0).abs() < 1e-12);
        for k in [0, 1, 3, 4] {
            assert!(s.magnitudes[k] < 1e-12);
        }
    }

    #[test]
    fn non_power_of_two_even_sizes_use_direct_transform() {
        let s = dft(&tone(12, 3, 2.0), 50.0).unwrap();
        assert!((s.magnitudes[3] - 12.0).abs() < 1e-9);
        assert_eq!(dft(&[0.0; 7], 50.0).unwrap_err(), Error::BadWindowSize(7));
        assert_eq!(dft(&[0.0; 6], 50.0).unwrap_err(), Error::BadWindowSize(6));
    }

    #[test]
    fn bin_ranges_partition_the_one_sided_spectrum() {
        assert_eq!(
            bin_index_ranges(128, 3).unwrap(),
            vec![(1, 21), (22, 42), (43, 64)]
        );
        assert_eq!(bin_index_ranges(8, 4).unwrap(), vec![(1, 1), (2, 2), (3, 3), (4, 4)]);
        assert!(matches!(bin_index_ranges(8, 5), Err(Error::BadBinCount { .. })));
        assert!(matches!(bin_index_ranges(8, 0), Err(Error::BadBinCount { .. })));
    }

    #[test]
    fn two_tones_three_bins() {
        let x = add(&tone(128, 5, 1.0), &tone(128, 30, 0.5));
        let df = dominant_frequencies(&dft(&x, 50.0).unwrap(), 3, 50.0).unwrap();
        assert_eq!(df.indices, vec![5, 30, 43]);
        let expected = [1.953125, 11.71875, 16.796875];
        for (v, e) in df.values_hz.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(df.bin_edges_hz.len(), 4);
    }

    #[test]
    fn zero_window_takes_lowest_frequency_per_bin() {
        let df = dominant_frequencies(&dft(&[0.0; 128], 50.0).unwrap(), 3, 50.0).unwrap();
        assert_eq!(df.indices, vec![1, 22, 43]);
    }

    #[test]
    fn single_bin_single_tone() {
        let df = dominant_frequencies(&dft(&tone(128, 10, 1.0), 50.0).unwrap(), 1, 50.0).unwrap();
        assert!((df.values_hz[0] - 3.90625).abs() < 1e-12);
    }

    #[test]
    fn hash_anchor_values() {
        let h2 = HashSpec::new(HashFunction::H2, 50.0, 128, 3).unwrap();
        assert_eq!(hash_frequency(5.0, &h2).unwrap(), 1);
        let h5 = HashSpec::new(HashFunction::H5, 50.0, 128, 3).unwrap();
        assert_eq!(hash_frequency(24.6, &h5).unwrap(), 0);
        let h7 = HashSpec::new(HashFunction::H7, 50.0, 128, 3).unwrap();
        assert_eq!(hash_frequency(4.7, &h7).unwrap(), 12);
    }

    #[test]
    fn hash_tuple_anchor() {
        let spec = HashSpec::new(HashFunction::H2, 50.0, 128, 3).unwrap();
        let df = DominantFrequencies {
            values_hz: vec![5.0, 12.2, 20.1],
            indices: vec![0, 0, 0],
            bin_edges_hz: vec![],
        };
        assert_eq!(hash_tuple(&df, &spec).unwrap(), vec![1, 1, 0]);
        assert_eq!(hash_tuple(&df, &spec).unwrap(), hash_tuple(&df, &spec).unwrap());
    }

    #[test]
    fn near_zero_frequencies_hit_bucket_zero_under_h5() {
        let spec = HashSpec::new(HashFunction::H5, 50.0, 128, 3).unwrap();
        let df = DominantFrequencies {
            values_hz: vec![1e-6; 3],
            indices: vec![0; 3],
            bin_edges_hz: vec![],
        };
        assert_eq!(hash_tuple(&df, &spec).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn bucket_counts() {
        let h = |f| HashSpec::new(f, 50.0, 128, 3).unwrap().bucket_count();
        // c = ceil(50/6) = 9, largest reduced value 8
        assert_eq!(h(HashFunction::H0), 4); // floor(24*8/50) = 3
        assert_eq!(h(HashFunction::H1), 3); // floor(18*8/50) = 2
        assert_eq!(h(HashFunction::H2), 3);
        assert_eq!(h(HashFunction::H3), 2); // floor(12*8/50) = 1
        assert_eq!(h(HashFunction::H4), 13); // round(12.5)
        assert_eq!(h(HashFunction::H5), 25);
        assert_eq!(h(HashFunction::H6), 128);
        assert_eq!(h(HashFunction::H7), 64);
        assert_eq!(h(HashFunction::H8), 43);
    }

    #[test]
    fn negative_and_nan_frequencies_are_rejected() {
        let spec = HashSpec::new(HashFunction::H0, 50.0, 128, 3).unwrap();
        assert_eq!(hash_frequency(-0.1, &spec), Err(Error::NegativeFrequency(-0.1)));
        assert_eq!(hash_frequency(f64::NAN, &spec), Err(Error::NonFiniteFrequency));
    }

    #[test]
    fn hash_function_names_parse() {
        assert_eq!("h7".parse::<HashFunction>().unwrap(), HashFunction::H7);
        assert_eq!("H0".parse::<HashFunction>().unwrap(), HashFunction::H0);
        assert!("H9".parse::<HashFunction>().is_err());
    }
}
