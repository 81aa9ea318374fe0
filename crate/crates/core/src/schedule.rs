//! Piecewise-constant Hamiltonians `Ĥ(t) = h_a(t) T_a` and their time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One segment of a schedule file: `h` applies until time `until`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub until: f64,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSchedule {
    breakpoints: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

impl HamiltonianSchedule {
    pub fn new(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 || coefficients.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidInput(format!(
                "schedule needs K+1 breakpoints for K segments, got {} and {}",
                breakpoints.len(),
                coefficients.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        let n = coefficients[0].len();
        if coefficients.iter().any(|h| h.len() != n) {
            return Err(Error::Dimension("all segments must have the same number of coefficients".into()));
        }
        if coefficients.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("Hamiltonian coefficients must be finite".into()));
        }
        Ok(HamiltonianSchedule { breakpoints, coefficients })
    }

    /// Constant `h` on `[0, t_end]`.
    pub fn constant(h: Vec<f64>, t_end: f64) -> Result<Self> {
        Self::new(vec![0.0, t_end], vec![h])
    }

    /// Segments starting at `t = 0`.
    pub fn from_segments(segments: &[Segment]) -> Result<Self> {
        let mut breakpoints = vec![0.0];
        breakpoints.extend(segments.iter().map(|s| s.until));
        Self::new(breakpoints, segments.iter().map(|s| s.h.clone()).collect())
    }

    pub fn to_segments(&self) -> Vec<Segment> {
        self.breakpoints[1..]
            .iter()
            .zip(&self.coefficients)
            .map(|(&until, h)| Segment { until, h: h.clone() })
            .collect()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Number of coefficients per segment (must equal the algebra dimension).
    pub fn n(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Index of the segment containing `t` (right-continuous; the last
    /// segment is closed).
    pub fn segment_at(&self, t: f64) -> usize {
        let k = self.breakpoints[1..].partition_point(|&b| b <= t);
        k.min(self.coefficients.len() - 1)
    }

    pub fn h_at(&self, t: f64) -> &[f64] {
        &self.coefficients[self.segment_at(t)]
    }

    /// Time average of `h` over `[a, b]`.
    pub fn average_h(&self, a: f64, b: f64) -> Vec<f64> {
        let mut acc = vec![0.0; self.n()];
        for (k, h) in self.coefficients.iter().enumerate() {
            let lo = self.breakpoints[k].max(a);
            let hi = self.breakpoints[k + 1].min(b);
            if hi > lo {
                for (x, &c) in acc.iter_mut().zip(h) {
                    *x += c * (hi - lo);
                }
            }
        }
        acc.iter().map(|x| x / (b - a)).collect()
    }

    /// The same schedule cut at `t_final`.
    pub fn truncated(&self, t_final: f64) -> Result<Self> {
        if !(t_final > self.start()) || t_final > self.end() * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "t_final = {t_final} outside the schedule span ({}, {}]",
                self.start(),
                self.end()
            )));
        }
        let mut breakpoints = vec![self.start()];
        let mut coefficients = Vec::new();
        for (k, h) in self.coefficients.iter().enumerate() {
            let lo = self.breakpoints[k];
            if lo >= t_final {
                break;
            }
            breakpoints.push(self.breakpoints[k + 1].min(t_final));
            coefficients.push(h.clone());
        }
        Self::new(breakpoints, coefficients)
    }

    /// Time grid over the whole schedule with steps of at most `dt`; no step
    /// crosses a breakpoint.
    pub fn grid(&self, dt: f64) -> Result<TimeGrid> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let mut times = vec![self.start()];
        let mut segment = Vec::new();
        for k in 0..self.coefficients.len() {
            let (lo, hi) = (self.breakpoints[k], self.breakpoints[k + 1]);
            let steps = (((hi - lo) / dt) - 1e-9).ceil().max(1.0) as usize;
            let h = (hi - lo) / steps as f64;
            for i in 1..=steps {
                times.push(if i == steps { hi } else { lo + h * i as f64 });
                segment.push(k);
            }
        }
        Ok(TimeGrid { times, segment })
    }
}

/// Grid points `t_0 < … < t_K` and, for each step, the schedule segment it
/// lies in.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub times: Vec<f64>,
    pub segment: Vec<usize>,
}

impl TimeGrid {
    pub fn steps(&self) -> usize {
        self.segment.len()
    }

    pub fn step_len(&self, k: usize) -> f64 {
        self.times[k + 1] - self.times[k]
    }
}
