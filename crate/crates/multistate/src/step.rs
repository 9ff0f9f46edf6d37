//! Right-continuous step functions over jump times.

/// A right-continuous step function that is zero before its first jump time.
///
/// `times` is strictly increasing; `values[j]` is the function value on
/// `[times[j], times[j+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        StepCurve { times, values }
    }

    pub fn zero() -> Self {
        StepCurve {
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value at `t`: the value of the last jump at or before `t`, zero if
    /// there is none.
    pub fn value_at(&self, t: f64) -> f64 {
        match self
            .times
            .partition_point(|&u| u <= t)
            .checked_sub(1)
        {
            Some(j) => self.values[j],
            None => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}
