//! The multivariate Nelson-Aalen estimator of cumulative transition hazards.
//!
//! In a non-Markov model the estimand is the cumulative partly conditional
//! transition rate: the instantaneous `l -> m` rate conditional only on the
//! current state, not the full history.

use crate::matrix::SquareMatrix;
use crate::step::StepCurve;
use crate::table::EventTable;

/// Step-function increments of the estimated cumulative hazard matrix.
///
/// Each increment has off-diagonal entries `dN_lm(t_j) / Y_l(t_j)` where
/// `Y_l(t_j) > 0` (zero otherwise) and diagonal entries chosen so every row
/// sums to zero. The sample size `n` is carried for standardization in
/// resampling.
#[derive(Debug, Clone)]
pub struct CumulativeHazardMatrix {
    num_states: usize,
    n: usize,
    times: Vec<f64>,
    increments: Vec<SquareMatrix>,
}

/// Compute the Nelson-Aalen estimator from an event table.
pub fn nelson_aalen(table: &EventTable) -> CumulativeHazardMatrix {
    let k = table.num_states();
    let mut increments = Vec::with_capacity(table.times().len());
    for j in 0..table.times().len() {
        let mut inc = SquareMatrix::zeros(k);
        for from in 0..k {
            let risk = table.at_risk(j, from);
            if risk == 0 {
                continue;
            }
            let mut out = 0.0;
            for to in 0..k {
                if to == from {
                    continue;
                }
                let d = table.count(j, from, to);
                if d > 0 {
                    let delta = f64::from(d) / f64::from(risk);
                    inc.set(from, to, delta);
                    out += delta;
                }
            }
            if out != 0.0 {
                inc.set(from, from, -out);
            }
        }
        increments.push(inc);
    }
    let haz = CumulativeHazardMatrix {
        num_states: k,
        n: table.n(),
        times: table.times().to_vec(),
        increments,
    };
    debug_assert!(haz.increments_are_valid());
    haz
}

impl CumulativeHazardMatrix {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn increments(&self) -> &[SquareMatrix] {
        &self.increments
    }

    pub fn increment(&self, time_index: usize) -> &SquareMatrix {
        &self.increments[time_index]
    }

    /// The cumulative hazard `A_lm` as a right-continuous step curve.
    pub fn cumulative(&self, from: usize, to: usize) -> StepCurve {
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut acc = 0.0;
        for (j, inc) in self.increments.iter().enumerate() {
            let delta = inc.get(from, to);
            if delta != 0.0 {
                acc += delta;
                times.push(self.times[j]);
                values.push(acc);
            }
        }
        StepCurve::new(times, values)
    }

    /// Cumulative hazard value `A_lm(t)`.
    pub fn value_at(&self, from: usize, to: usize, t: f64) -> f64 {
        let end = self.times.partition_point(|&u| u <= t);
        self.increments[..end]
            .iter()
            .map(|inc| inc.get(from, to))
            .sum()
    }

    pub(crate) fn increments_are_valid(&self) -> bool {
        self.increments.iter().all(|inc| {
            (0..self.num_states).all(|l| {
                let row = inc.row(l);
                let sum: f64 = row.iter().sum();
                sum.abs() <= 1e-12
                    && row
                        .iter()
                        .enumerate()
                        .all(|(m, &v)| if m == l { (-1.0..=0.0).contains(&v) } else { (0.0..=1.0).contains(&v) })
            })
        })
    }
}
