//! Sampled signals read from `t,y` CSV files.

use std::path::Path;

use anyhow::{ensure, Context, Result};
use fracdiff::Signal;
use serde::Deserialize;

/// Largest deviation from the uniform grid, relative to the horizon.
pub const SPACING_TOL: f64 = 1e-12;

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    y: f64,
}

/// Samples of a signal on a uniform grid `t_k = k T / (n - 1)`.
#[derive(Debug, Clone)]
pub struct Samples {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Samples {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        let headers = reader.headers()?.clone();
        ensure!(
            headers.len() == 2 && &headers[0] == "t" && &headers[1] == "y",
            "{}: expected header `t,y`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        );
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
            times.push(row.t);
            values.push(row.y);
        }
        Self::new(times, values).with_context(|| format!("{}", path.display()))
    }

    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        ensure!(times.len() >= 2, "at least two samples are required");
        ensure!(
            times.iter().chain(&values).all(|v| v.is_finite()),
            "samples must be finite"
        );
        let horizon = times[times.len() - 1];
        ensure!(horizon > 0.0, "the last sample time must be positive");
        let h = horizon / (times.len() - 1) as f64;
        let worst = times
            .iter()
            .enumerate()
            .map(|(k, &t)| (t - k as f64 * h).abs())
            .fold(0.0f64, f64::max);
        ensure!(
            worst <= SPACING_TOL * horizon,
            "sample times must form a uniform grid starting at 0 (deviation {worst:e})"
        );
        Ok(Self { times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn signal(&self) -> Signal<f64> {
        Signal::tabulated(self.values.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_accepted() {
        let t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let s = Samples::new(t, vec![0.0; 11]).unwrap();
        assert_eq!(s.len(), 11);
        assert_eq!(s.horizon(), 1.0);
    }

    #[test]
    fn irregular_grid_rejected() {
        let mut t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        t[4] += 1e-9;
        assert!(Samples::new(t, vec![0.0; 11]).is_err());
        let shifted: Vec<f64> = (0..11).map(|k| 0.5 + k as f64 * 0.1).collect();
        assert!(Samples::new(shifted, vec![0.0; 11]).is_err());
        assert!(Samples::new(vec![0.0], vec![1.0]).is_err());
    }
}
