use std::f64::consts::PI;

use dfam_core::spectral::{self, Fft, HashFunction, HashSpec, SpectrumAnalyzer};
use proptest::prelude::*;

/// Direct O(W^2) one-sided magnitude spectrum.
fn naive_magnitudes(x: &[f64]) -> Vec<f64> {
    let w = x.len();
    (0..=w / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let angle = 2.0 * PI * ((k * t) % w) as f64 / w as f64;
                re += v * angle.cos();
                im -= v * angle.sin();
            }
            re.hypot(im)
        })
        .collect()
}

fn max_relative_error(fast: &[f64], slow: &[f64]) -> f64 {
    fast.iter()
        .zip(slow)
        .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Independent restatement of the nine bucket formulas.
fn hash_oracle(f: HashFunction, v: f64, fs: f64, g: f64, w: f64) -> i64 {
    let c = (fs / (2.0 * g)).ceil() as i64;
    let r = (v.round() as i64).rem_euclid(c) as f64;
    match f {
        HashFunction::H0 => (8.0 * g * r / fs).floor() as i64,
        HashFunction::H1 => (g * r / (fs / (2.0 * g))).floor() as i64,
        HashFunction::H2 => (6.0 * g * r / fs).floor() as i64,
        HashFunction::H3 => (4.0 * g * r / fs).floor() as i64,
        HashFunction::H4 => ((v / 2.0).round() as i64).rem_euclid((fs / 4.0).round() as i64),
        HashFunction::H5 => (v.round() as i64).rem_euclid((fs / 2.0).round() as i64),
        HashFunction::H6 => ((2.0 * v * w / fs).round() as i64).rem_euclid(w as i64),
        HashFunction::H7 => ((v * w / fs).round() as i64).rem_euclid((w / 2.0).round() as i64),
        HashFunction::H8 => ((2.0 * v * w / (3.0 * fs)).round() as i64).rem_euclid((w / 3.0).round() as i64),
    }
}

proptest! {
    #[test]
    fn fft_matches_naive_dft(exp in 3u32..10, seed in prop::collection::vec(-50.0f64..50.0, 512)) {
        let w = 1usize << exp;
        let x = &seed[..w];
        let fast = Fft::new(w).unwrap().magnitudes(x);
        prop_assert!(max_relative_error(&fast, &naive_magnitudes(x)) < 1e-9);
    }

    #[test]
    fn non_power_of_two_sizes_match_naive_dft(half in 4usize..40, seed in prop::collection::vec(-5.0f64..5.0, 80)) {
        let x = &seed[..2 * half];
        let spec = SpectrumAnalyzer::new(2 * half, 50.0).unwrap().spectrum(x).unwrap();
        prop_assert!(max_relative_error(&spec.magnitudes, &naive_magnitudes(x)) < 1e-9);
    }

    #[test]
    fn hash_agrees_with_oracle_and_range(v in 0.0f64..25.0, f in 0usize..9, g in 1usize..8, wexp in 4u32..10) {
        let w = 1usize << wexp;
        let func = HashFunction::ALL[f];
        if let Ok(spec) = HashSpec::new(func, 50.0, w, g) {
            let h = spectral::hash_frequency(v, &spec).unwrap();
            prop_assert_eq!(h as i64, hash_oracle(func, v, 50.0, g as f64, w as f64));
            prop_assert!(h < spec.bucket_count());
        }
    }

    #[test]
    fn dominant_frequencies_stay_in_their_bins(seed in prop::collection::vec(-1.0f64..1.0, 128), g in 1usize..10) {
        let spec = spectral::dft(&seed, 50.0).unwrap();
        let df = spectral::dominant_frequencies(&spec, g, 50.0).unwrap();
        for (i, v) in df.values_hz.iter().enumerate() {
            prop_assert!(*v > df.bin_edges_hz[i] && *v <= df.bin_edges_hz[i + 1] + 1e-12);
        }
    }
}

#[test]
fn pure_tones_peak_at_their_index() {
    for &(w, k) in &[(64usize, 5usize), (128, 17), (256, 100)] {
        let x: Vec<f64> = (0..w).map(|t| (2.0 * PI * (k * t) as f64 / w as f64).cos()).collect();
        let spec = spectral::dft(&x, 50.0).unwrap();
        let (peak, _) = spec
            .magnitudes
            .iter()
            .enumerate()
            .fold((0, 0.0), |b, (i, &m)| if m > b.1 { (i, m) } else { b });
        assert_eq!(peak, k);
        assert!((spec.magnitudes[k] - w as f64 / 2.0).abs() < 1e-9);
    }
}

#[test]
fn bucket_counts_at_default_parameters() {
    let counts: Vec<u32> = HashFunction::ALL
        .iter()
        .map(|&f| HashSpec::new(f, 50.0, 128, 3).unwrap().bucket_count())
        .collect();
    assert_eq!(counts, [4, 3, 3, 2, 13, 25, 128, 64, 43]);
}
