//! Handover KPIs: per-run handover count and average handover geometry,
//! aggregated over Monte Carlo iterations.

use serde::{Deserialize, Serialize};

use crate::handover::{EventKind, HandoverEvent};
use crate::scenario::RouteLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub ho_times: u32,
    /// Best-cell geometry at each executed handover.
    pub ho_best_geos: Vec<f64>,
    pub connection_losses: u32,
    pub seed: u64,
    pub events: Vec<HandoverEvent>,
}

impl RunResult {
    pub fn from_events(events: &[HandoverEvent], seed: u64) -> Self {
        let ho_best_geos: Vec<f64> = events
            .iter()
            .filter(|e| e.kind == EventKind::Handover)
            .map(|e| e.best_geo_db.expect("handover carries a best geometry"))
            .collect();
        Self {
            ho_times: ho_best_geos.len() as u32,
            ho_best_geos,
            connection_losses: events
                .iter()
                .filter(|e| e.kind == EventKind::ConnectionLoss)
                .count() as u32,
            seed,
            events: events.to_vec(),
        }
    }

    pub fn ho_avg_geo(&self) -> Option<f64> {
        ho_avg_geo(&self.ho_best_geos)
    }
}

/// Arithmetic mean (in dB) of the geometries sampled at handover
/// execution; undefined without handovers.
pub fn ho_avg_geo(best_geos: &[f64]) -> Option<f64> {
    if best_geos.is_empty() {
        None
    } else {
        Some(best_geos.iter().sum::<f64>() / best_geos.len() as f64)
    }
}

/// Coordinates of a cell in a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub case: RouteLabel,
    pub ttt_tics: u32,
    pub den_gnb: u32,
    pub velocity_kmh: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiCell {
    pub point: GridPoint,
    pub iterations: u32,
    pub mean_ho_rate: f64,
    /// Mean of per-run averages over runs with at least one handover.
    pub ho_avg_geo_db: Option<f64>,
    /// Mean over all handover events of all runs.
    pub pooled_ho_avg_geo_db: Option<f64>,
    pub failure: bool,
    pub iterations_with_handover: u32,
    pub connection_losses_mean: f64,
}

/// Running sums behind a [`KpiCell`]. Merging is associative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KpiAccumulator {
    pub runs: u64,
    pub ho_times: u64,
    pub connection_losses: u64,
    pub runs_with_handover: u64,
    pub sum_run_avg_geo: f64,
    pub sum_event_geo: f64,
}

impl KpiAccumulator {
    pub fn push(&mut self, run: &RunResult) {
        self.runs += 1;
        self.ho_times += u64::from(run.ho_times);
        self.connection_losses += u64::from(run.connection_losses);
        if let Some(avg) = run.ho_avg_geo() {
            self.runs_with_handover += 1;
            self.sum_run_avg_geo += avg;
        }
        self.sum_event_geo += run.ho_best_geos.iter().sum::<f64>();
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            runs: self.runs + other.runs,
            ho_times: self.ho_times + other.ho_times,
            connection_losses: self.connection_losses + other.connection_losses,
            runs_with_handover: self.runs_with_handover + other.runs_with_handover,
            sum_run_avg_geo: self.sum_run_avg_geo + other.sum_run_avg_geo,
            sum_event_geo: self.sum_event_geo + other.sum_event_geo,
        }
    }

    pub fn finish(&self, point: GridPoint) -> KpiCell {
        let n = self.runs.max(1) as f64;
        let mean_ho_rate = self.ho_times as f64 / n;
        KpiCell {
            point,
            iterations: self.runs as u32,
            mean_ho_rate,
            ho_avg_geo_db: (self.runs_with_handover > 0)
                .then(|| self.sum_run_avg_geo / self.runs_with_handover as f64),
            pooled_ho_avg_geo_db: (self.ho_times > 0)
                .then(|| self.sum_event_geo / self.ho_times as f64),
            failure: is_failure(mean_ho_rate),
            iterations_with_handover: self.runs_with_handover as u32,
            connection_losses_mean: self.connection_losses as f64 / n,
        }
    }
}

/// A mean handover rate below one counts as handover failure.
pub fn is_failure(mean_ho_rate: f64) -> bool {
    mean_ho_rate < 1.0
}

pub fn aggregate(runs: &[RunResult], point: GridPoint) -> KpiCell {
    let mut acc = KpiAccumulator::default();
    for r in runs {
        acc.push(r);
    }
    acc.finish(point)
}
