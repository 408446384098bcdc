use dfam_core::signal::{self, SegmentationConfig, StreamKind, TimeSeries};
use proptest::prelude::*;

fn stream(n: usize) -> TimeSeries {
    let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
    TimeSeries::from_axes(StreamKind::PHONE_ACCEL, 50.0, &x, &x, &x).unwrap()
}

#[test]
fn window_counts_for_thirty_two_sample_windows() {
    let s = stream(3000);
    let dense = signal::segment(&s, &SegmentationConfig::new(32, 0.9, 1).unwrap()).unwrap();
    let sparse = signal::segment(&s, &SegmentationConfig::new(32, 0.7, 1).unwrap()).unwrap();
    assert_eq!(dense.len(), 928);
    assert_eq!(sparse.len(), 310);
    assert_eq!(24 * (dense.len() - 1), 22248);
    assert_eq!(24 * (sparse.len() - 1), 7416);
}

proptest! {
    #[test]
    fn windows_are_in_bounds_and_evenly_spaced(n in 32usize..2000, wexp in 3u32..6, r in 0.0f64..0.95) {
        let w = 1usize << wexp;
        prop_assume!(n >= w);
        let Ok(cfg) = SegmentationConfig::new(w, r, 1) else { return Ok(()) };
        let s = stream(n);
        let windows = signal::segment(&s, &cfg).unwrap();
        prop_assert!(!windows.is_empty());
        let stride = w as f64 * (1.0 - r);
        for (k, win) in windows.iter().enumerate() {
            prop_assert_eq!(win.index, k);
            prop_assert_eq!(win.len(), w);
            prop_assert!(win.start_index + w <= n);
            prop_assert!((win.start_index as f64 - k as f64 * stride).abs() <= 0.5 + 1e-9);
            prop_assert_eq!(win.axes[0][0], win.start_index as f64);
        }
        // the next unrounded offset would run past the end
        prop_assert!(windows.len() as f64 * stride > (n - w) as f64 - 1e-9);
    }

    #[test]
    fn filter_preserves_length_and_bounds(values in prop::collection::vec(-10.0f64..10.0, 5..200), half in 0usize..3) {
        let len = 2 * half + 1;
        prop_assume!(len <= values.len());
        let s = TimeSeries::from_axes(StreamKind::WATCH_GYRO, 50.0, &values, &values, &values).unwrap();
        let f = signal::lowpass_filter(&s, len).unwrap();
        prop_assert_eq!(f.len(), s.len());
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in f.axis(0) {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}
