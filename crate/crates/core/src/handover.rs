//! A3 / time-to-trigger handover state machine.
//!
//! The state machine is fed one [`GeometryReport`] per tic. A handover to
//! the best cell is executed once the A3 entry condition
//!
//! ```text
//! best != serving && best_geo > sinr_min
//!     && best_geo - avg_geo + best_cio - current_cio > ho_hys
//! ```
//!
//! has held for `ttt_tics` consecutive tics towards the same target.
//! `avg_geo` is the mean of the last `avg_window` serving geometries and the
//! condition is only evaluated once the window is full. After a handover the
//! TU is in an execution window of `ho_exec_time_tics` tics during which no
//! new trigger is evaluated.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kpi::RunResult;
use crate::mobility::position_at;
use crate::radio::{measure_into, GeometryReport, LinkConfig};
use crate::scenario::{GnbSite, ScenarioConfig};

/// Serving-side quantity the best geometry is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum A3Reference {
    /// Rolling mean of the serving geometry.
    #[default]
    Average,
    /// Serving geometry of the current tic.
    Instant,
}

impl fmt::Display for A3Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            A3Reference::Average => "avg",
            A3Reference::Instant => "instant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoverParams {
    pub ttt_tics: u32,
    pub ho_hys_db: f64,
    pub ho_exec_time_tics: u32,
    pub best_cio_db: f64,
    pub current_cio_db: f64,
    pub avg_window: usize,
    pub sinr_min_db: f64,
    pub a3_reference: A3Reference,
}

impl Default for HandoverParams {
    fn default() -> Self {
        Self {
            ttt_tics: 1,
            ho_hys_db: 3.0,
            ho_exec_time_tics: 25,
            best_cio_db: 0.0,
            current_cio_db: 0.0,
            avg_window: 10,
            sinr_min_db: -7.0,
            a3_reference: A3Reference::Average,
        }
    }
}

impl HandoverParams {
    /// A time-to-trigger that is never reached in practice.
    pub const TTT_NEVER: u32 = u32::MAX;

    pub fn with_ttt(self, ttt_tics: u32) -> Self {
        Self { ttt_tics, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Handover,
    ConnectionLoss,
    Reattach,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Handover => "handover",
            EventKind::ConnectionLoss => "connection_loss",
            EventKind::Reattach => "reattach",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub kind: EventKind,
    pub tic: u64,
    pub from: Option<usize>,
    pub to: Option<usize>,
    /// Best-cell geometry at the event tic; `None` only for a connection
    /// loss in a dead zone.
    pub best_geo_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("report for tic {got} fed to state expecting tic {expected}")]
    TicMismatch { expected: u64, got: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverState {
    pub serving: Option<usize>,
    pub ho_timer: u32,
    pub ho_trigger: bool,
    pub armed_target: Option<usize>,
    pub exec_remaining: u32,
    pub geo_window: VecDeque<f64>,
    pub ho_times: u32,
    pub events: Vec<HandoverEvent>,
    /// Tic of the last report consumed.
    pub tic: u64,
}

impl HandoverState {
    /// Attaches to the best cell of the first report, or starts detached.
    pub fn initial_attach(report: &GeometryReport, params: &HandoverParams) -> Self {
        Self {
            serving: report.best_gnb(),
            ho_timer: 0,
            ho_trigger: false,
            armed_target: None,
            exec_remaining: 0,
            geo_window: VecDeque::with_capacity(params.avg_window),
            ho_times: 0,
            events: Vec::new(),
            tic: report.tic,
        }
    }

    pub fn is_detached(&self) -> bool {
        self.serving.is_none()
    }

    /// Mean of the serving geometry window, if it holds any samples.
    pub fn avg_geo(&self) -> Option<f64> {
        if self.geo_window.is_empty() {
            None
        } else {
            Some(self.geo_window.iter().sum::<f64>() / self.geo_window.len() as f64)
        }
    }

    fn push_geo(&mut self, geo: f64, window: usize) {
        while self.geo_window.len() >= window {
            self.geo_window.pop_front();
        }
        self.geo_window.push_back(geo);
    }

    fn disarm(&mut self) {
        self.ho_timer = 0;
        self.ho_trigger = false;
        self.armed_target = None;
    }

    fn emit(&mut self, event: HandoverEvent) -> Option<EventKind> {
        self.events.push(event);
        Some(event.kind)
    }

    /// Advances the state by one tic. The report's `serving_geo_db` must be
    /// measured against the current serving cell. Returns the kind of the
    /// event emitted this tic, if any.
    pub fn step(
        &mut self,
        report: &GeometryReport,
        params: &HandoverParams,
    ) -> Result<Option<EventKind>, StepError> {
        if report.tic != self.tic + 1 {
            return Err(StepError::TicMismatch {
                expected: self.tic + 1,
                got: report.tic,
            });
        }
        self.tic = report.tic;
        let tic = report.tic;

        let Some(serving) = self.serving else {
            return Ok(match report.best {
                Some(best) if best.geo_db >= params.sinr_min_db => {
                    self.serving = Some(best.gnb_id);
                    self.geo_window.clear();
                    self.disarm();
                    self.emit(HandoverEvent {
                        kind: EventKind::Reattach,
                        tic,
                        from: None,
                        to: Some(best.gnb_id),
                        best_geo_db: Some(best.geo_db),
                    })
                }
                _ => None,
            });
        };

        if self.exec_remaining > 0 {
            self.exec_remaining -= 1;
            if let Some(geo) = report.serving_geo_db {
                self.push_geo(geo, params.avg_window);
            }
            return Ok(None);
        }

        let serving_geo = match report.serving_geo_db {
            Some(g) if g >= params.sinr_min_db => g,
            _ => {
                self.serving = None;
                self.geo_window.clear();
                self.disarm();
                return Ok(self.emit(HandoverEvent {
                    kind: EventKind::ConnectionLoss,
                    tic,
                    from: Some(serving),
                    to: None,
                    best_geo_db: report.best_geo_db(),
                }));
            }
        };

        self.push_geo(serving_geo, params.avg_window);
        if self.geo_window.len() < params.avg_window {
            self.disarm();
            return Ok(None);
        }

        let reference = match params.a3_reference {
            A3Reference::Average => self.avg_geo().expect("window is full"),
            A3Reference::Instant => serving_geo,
        };
        let entering = report.best.filter(|best| {
            best.gnb_id != serving
                && best.geo_db > params.sinr_min_db
                && best.geo_db - reference + params.best_cio_db - params.current_cio_db
                    > params.ho_hys_db
        });
        match entering {
            Some(best) if self.ho_timer == 0 || self.armed_target == Some(best.gnb_id) => {
                self.ho_trigger = true;
                self.armed_target = Some(best.gnb_id);
                self.ho_timer += 1;
            }
            _ => self.disarm(),
        }

        if self.ho_timer == params.ttt_tics {
            let target = self.armed_target.expect("armed while timing");
            self.serving = Some(target);
            self.exec_remaining = params.ho_exec_time_tics;
            self.ho_times += 1;
            self.geo_window.clear();
            self.disarm();
            return Ok(self.emit(HandoverEvent {
                kind: EventKind::Handover,
                tic,
                from: Some(serving),
                to: Some(target),
                best_geo_db: report.best_geo_db(),
            }));
        }
        Ok(None)
    }
}

/// One row of the optional per-tic trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub tic: u64,
    pub x_m: f64,
    pub y_m: f64,
    pub serving: Option<usize>,
    pub best: Option<usize>,
    pub serving_geo_db: Option<f64>,
    pub best_geo_db: Option<f64>,
    pub ho_timer: u32,
    pub event: Option<EventKind>,
}

/// Replays one TU over the whole run. `trace`, when given, receives one
/// row per tic, starting with the attachment tic 0.
pub fn run_tu<R: Rng + ?Sized>(
    scenario: &ScenarioConfig,
    sites: &[GnbSite],
    params: &HandoverParams,
    link: &LinkConfig,
    rng: &mut R,
    seed: u64,
    mut trace: Option<&mut dyn FnMut(&TraceRow)>,
) -> RunResult {
    let v = scenario.velocity_mps();
    let mut report = GeometryReport::default();

    let pos = position_at(&scenario.route, v, 0, scenario.tic_ms);
    measure_into(0, &pos, sites, None, link, rng, &mut report);
    let mut state = HandoverState::initial_attach(&report, params);
    if let Some(f) = trace.as_mut() {
        report.serving_geo_db = state
            .serving
            .and_then(|id| crate::radio::geometry_from_report(&report, id, link));
        f(&row(&report, &state, pos, None));
    }

    for tic in 1..=scenario.num_tics() {
        let pos = position_at(&scenario.route, v, tic, scenario.tic_ms);
        measure_into(tic, &pos, sites, state.serving, link, rng, &mut report);
        let event = state
            .step(&report, params)
            .expect("tics are fed in order");
        if let Some(f) = trace.as_mut() {
            f(&row(&report, &state, pos, event));
        }
    }

    RunResult::from_events(&state.events, seed)
}

fn row(
    report: &GeometryReport,
    state: &HandoverState,
    pos: crate::scenario::Point,
    event: Option<EventKind>,
) -> TraceRow {
    TraceRow {
        tic: report.tic,
        x_m: pos.x,
        y_m: pos.y,
        serving: state.serving,
        best: report.best_gnb(),
        serving_geo_db: report.serving_geo_db,
        best_geo_db: report.best_geo_db(),
        ho_timer: state.ho_timer,
        event,
    }
}
