use std::path::Path;

/// Write a file atomically: write to `<path>.tmp` in the same directory,
/// then rename over the target.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

/// Median of a non-empty slice; even lengths average the middle pair.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median treating absent values as worst (infinite wait).
pub(crate) fn median_wait(values: &[Option<f64>]) -> Option<f64> {
    let mut sortable: Vec<f64> = values
        .iter()
        .map(|v| v.unwrap_or(f64::INFINITY))
        .collect();
    let m = median(&mut sortable);
    if m.is_finite() {
        Some(m)
    } else {
        None
    }
}
