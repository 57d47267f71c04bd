/// Row-wise numerically stabilized softmax (subtract the row max).
pub fn softmax_rows(logits: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(logits.len(), rows * cols);
    let mut out = vec![0.0; logits.len()];
    for r in 0..rows {
        let row = &logits[r * cols..(r + 1) * cols];
        let target = &mut out[r * cols..(r + 1) * cols];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (t, l) in target.iter_mut().zip(row) {
            *t = (l - max).exp();
            sum += *t;
        }
        for t in target.iter_mut() {
            *t /= sum;
        }
    }
    out
}

/// Row-wise softmax restricted to the legal entries; illegal entries get
/// probability 0 and the rest renormalize. Every row must have at least one
/// legal entry.
pub fn masked_softmax_rows(logits: &[f64], masks: &[bool], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(logits.len(), rows * cols);
    debug_assert_eq!(masks.len(), rows * cols);
    let mut out = vec![0.0; logits.len()];
    for r in 0..rows {
        let row = &logits[r * cols..(r + 1) * cols];
        let mask = &masks[r * cols..(r + 1) * cols];
        let target = &mut out[r * cols..(r + 1) * cols];
        let max = row
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        debug_assert!(max.is_finite(), "masked softmax row has no legal entry");
        let mut sum = 0.0;
        for ((t, l), m) in target.iter_mut().zip(row).zip(mask) {
            if *m {
                *t = (l - max).exp();
                sum += *t;
            }
        }
        for t in target.iter_mut() {
            *t /= sum;
        }
    }
    out
}
