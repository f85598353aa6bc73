use super::NiError;

/// Strictly positive, increasing list of test frequencies (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

pub const DEFAULT_GRID_LO: f64 = 1e-3;
pub const DEFAULT_GRID_HI: f64 = 1e3;
pub const DEFAULT_GRID_COUNT: usize = 2000;

impl FrequencyGrid {
    /// `count` logarithmically spaced points over `[lo, hi]`.
    pub fn log(lo: f64, hi: f64, count: usize) -> Result<Self, NiError> {
        if count == 0 {
            return Err(NiError::GridEmpty);
        }
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
            return Err(NiError::InvalidGrid(format!("need 0 < lo <= hi < inf, got [{lo}, {hi}]")));
        }
        if count == 1 {
            return Ok(Self { points: vec![lo] });
        }
        let (l0, l1) = (lo.log10(), hi.log10());
        let step = (l1 - l0) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| 10f64.powf(l0 + step * i as f64)).collect();
        points.dedup();
        Ok(Self { points })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Self, NiError> {
        if points.is_empty() {
            return Err(NiError::GridEmpty);
        }
        if let Some(bad) = points.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(NiError::InvalidGrid(format!("frequency {bad} is not finite and positive")));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::log(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_COUNT).expect("default grid is valid")
    }
}
