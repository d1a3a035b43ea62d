//! Monte Carlo engine: per-cell iteration loop, seed fan-out and the preset
//! sweeps.
//!
//! Every iteration draws a fresh deployment. Seeds are derived from the
//! master seed and the grid point itself, so a cell produces the same
//! numbers whether it runs alone or inside any sweep.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::handover::{run_tu, TraceRow};
use crate::kpi::{GridPoint, KpiAccumulator, KpiCell, RunResult};
use crate::scenario::{
    place_gnbs, seed_for, validate_config, ConfigErrors, Route, RouteLabel, SimConfig, ValidConfig,
};

const PLACEMENT_STREAM: u64 = 0;
const CHANNEL_STREAM: u64 = 1;

/// Execution knobs shared by cells and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunOptions {
    /// Common random numbers: the iteration seed ignores the TTT value, so
    /// every TTT of a (case, density, velocity) column sees the same
    /// deployments and channel draws.
    pub crn: bool,
    pub parallel: bool,
}

impl GridPoint {
    /// Applies the grid point to a base configuration.
    pub fn apply(&self, base: &SimConfig) -> SimConfig {
        let mut cfg = *base;
        cfg.scenario.route = Route::preset(self.case).unwrap_or(base.scenario.route);
        cfg.scenario.den_gnb = self.den_gnb;
        cfg.scenario.velocity_kmh = self.velocity_kmh;
        cfg.handover.ttt_tics = self.ttt_tics;
        cfg
    }

    fn seed_keys(&self, route: &Route, crn: bool) -> Vec<u64> {
        let mut keys = vec![match self.case {
            RouteLabel::CaseA => 1,
            RouteLabel::CaseB => 2,
            RouteLabel::Custom => 3,
        }];
        if self.case == RouteLabel::Custom {
            keys.extend([route.start.x, route.start.y, route.end.x, route.end.y].map(f64::to_bits));
        }
        keys.push(if crn { 0 } else { u64::from(self.ttt_tics) });
        keys.push(u64::from(self.den_gnb));
        keys.push(self.velocity_kmh.to_bits());
        keys
    }
}

/// Seed of one iteration of one grid point.
pub fn iteration_seed(
    master_seed: u64,
    point: &GridPoint,
    route: &Route,
    iteration: u32,
    crn: bool,
) -> u64 {
    let mut keys = point.seed_keys(route, crn);
    keys.push(u64::from(iteration));
    seed_for(master_seed, &keys)
}

/// Runs a single iteration: deploy, then replay the TU.
pub fn run_iteration(
    cfg: &ValidConfig,
    seed: u64,
    trace: Option<&mut dyn FnMut(&TraceRow)>,
) -> RunResult {
    let mut placement = ChaCha8Rng::seed_from_u64(seed);
    placement.set_stream(PLACEMENT_STREAM);
    let sites = place_gnbs(
        &cfg.scenario.area,
        cfg.scenario.gnb_count(),
        &cfg.site,
        &mut placement,
    );
    let mut channel = ChaCha8Rng::seed_from_u64(seed);
    channel.set_stream(CHANNEL_STREAM);
    run_tu(
        &cfg.scenario,
        &sites,
        &cfg.handover,
        &cfg.link,
        &mut channel,
        seed,
        trace,
    )
}

/// All iterations of one grid point, in iteration order.
pub fn run_cell_runs(
    base: &SimConfig,
    point: &GridPoint,
    iterations: u32,
    master_seed: u64,
    opts: RunOptions,
) -> Result<Vec<RunResult>, ConfigErrors> {
    let mut cfg = point.apply(base);
    cfg.scenario.iterations = iterations;
    cfg.scenario.seed = master_seed;
    let cfg = validate_config(cfg)?;
    let route = cfg.scenario.route;
    let one = |i: u32| run_iteration(&cfg, iteration_seed(master_seed, point, &route, i, opts.crn), None);
    Ok(if opts.parallel {
        (0..iterations).into_par_iter().map(one).collect()
    } else {
        (0..iterations).map(one).collect()
    })
}

pub fn run_cell(
    base: &SimConfig,
    point: &GridPoint,
    iterations: u32,
    master_seed: u64,
    opts: RunOptions,
) -> Result<KpiCell, ConfigErrors> {
    let runs = run_cell_runs(base, point, iterations, master_seed, opts)?;
    let mut acc = KpiAccumulator::default();
    for r in &runs {
        acc.push(r);
    }
    Ok(acc.finish(*point))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Both cases, TTT 1..12, densities 10..50, 50 km/h.
    Fig4,
    /// Case B, TTT 1..12, 10..50 km/h, density 10.
    Fig5,
    /// Same grid as `Fig4`, read as ho_avg_geo tables.
    Tables,
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "tables" => Ok(Preset::Tables),
            other => Err(format!("unknown preset `{other}` (expected fig4, fig5 or tables)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub cases: Vec<RouteLabel>,
    pub ttt_list: Vec<u32>,
    pub density_list: Vec<u32>,
    pub velocity_list: Vec<f64>,
    pub iterations: u32,
    pub master_seed: u64,
    pub options: RunOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep list `{0}` is empty")]
    EmptyList(&'static str),
    #[error("sweep list `{0}` contains a non-positive value")]
    NonPositive(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigErrors),
}

impl SweepSpec {
    pub fn preset(preset: Preset, iterations: u32, master_seed: u64) -> Self {
        let ttt_list = (1..=12).collect();
        match preset {
            Preset::Fig4 | Preset::Tables => Self {
                cases: vec![RouteLabel::CaseA, RouteLabel::CaseB],
                ttt_list,
                density_list: vec![10, 20, 30, 40, 50],
                velocity_list: vec![50.0],
                iterations,
                master_seed,
                options: RunOptions::default(),
            },
            Preset::Fig5 => Self {
                cases: vec![RouteLabel::CaseB],
                ttt_list,
                density_list: vec![10],
                velocity_list: vec![10.0, 20.0, 30.0, 40.0, 50.0],
                iterations,
                master_seed,
                options: RunOptions::default(),
            },
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.cases.is_empty() {
            return Err(SweepError::EmptyList("cases"));
        }
        if self.ttt_list.is_empty() {
            return Err(SweepError::EmptyList("ttt_list"));
        }
        if self.density_list.is_empty() {
            return Err(SweepError::EmptyList("density_list"));
        }
        if self.velocity_list.is_empty() {
            return Err(SweepError::EmptyList("velocity_list"));
        }
        if self.ttt_list.contains(&0) {
            return Err(SweepError::NonPositive("ttt_list"));
        }
        if self.density_list.contains(&0) {
            return Err(SweepError::NonPositive("density_list"));
        }
        if self.velocity_list.iter().any(|v| !(*v > 0.0)) {
            return Err(SweepError::NonPositive("velocity_list"));
        }
        if self.iterations == 0 {
            return Err(SweepError::NonPositive("iterations"));
        }
        Ok(())
    }

    /// Grid points in canonical order: case, ttt, density, velocity, all
    /// ascending.
    pub fn grid(&self) -> Vec<GridPoint> {
        let sorted_u32 = |v: &[u32]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut cases = self.cases.clone();
        cases.sort();
        cases.dedup();
        let mut velocities = self.velocity_list.clone();
        velocities.sort_by(f64::total_cmp);
        velocities.dedup();
        let ttts = sorted_u32(&self.ttt_list);
        let dens = sorted_u32(&self.density_list);

        let mut grid = Vec::with_capacity(cases.len() * ttts.len() * dens.len() * velocities.len());
        for &case in &cases {
            for &ttt_tics in &ttts {
                for &den_gnb in &dens {
                    for &velocity_kmh in &velocities {
                        grid.push(GridPoint {
                            case,
                            ttt_tics,
                            den_gnb,
                            velocity_kmh,
                        });
                    }
                }
            }
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub iterations: u32,
    pub crn: bool,
    /// Effective base configuration in config-file syntax.
    pub config: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<KpiCell>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn cell(&self, case: RouteLabel, ttt: u32, den: u32, velocity_kmh: f64) -> Option<&KpiCell> {
        self.cells.iter().find(|c| {
            c.point.case == case
                && c.point.ttt_tics == ttt
                && c.point.den_gnb == den
                && c.point.velocity_kmh == velocity_kmh
        })
    }
}

pub fn run_sweep(base: &SimConfig, spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let grid = spec.grid();
    let cell = |p: &GridPoint| run_cell(base, p, spec.iterations, spec.master_seed, spec.options);
    let cells: Result<Vec<KpiCell>, ConfigErrors> = if spec.options.parallel {
        grid.par_iter().map(cell).collect()
    } else {
        grid.iter().map(cell).collect()
    };
    Ok(SweepResult {
        cells: cells?,
        provenance: Provenance {
            master_seed: spec.master_seed,
            iterations: spec.iterations,
            crn: spec.options.crn,
            config: base.to_config_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_base() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.scenario.run_time_ms = 5_000;
        cfg
    }

    fn pt(ttt: u32, den: u32) -> GridPoint {
        GridPoint {
            case: RouteLabel::CaseB,
            ttt_tics: ttt,
            den_gnb: den,
            velocity_kmh: 50.0,
        }
    }

    #[test]
    fn preset_grids() {
        assert_eq!(SweepSpec::preset(Preset::Fig4, 1, 0).grid().len(), 120);
        assert_eq!(SweepSpec::preset(Preset::Tables, 1, 0).grid().len(), 120);
        let fig5 = SweepSpec::preset(Preset::Fig5, 1, 0).grid();
        assert_eq!(fig5.len(), 60);
        assert!(fig5.iter().all(|p| p.den_gnb == 10 && p.case == RouteLabel::CaseB));
    }

    #[test]
    fn grid_is_canonical() {
        let spec = SweepSpec {
            cases: vec![RouteLabel::CaseB, RouteLabel::CaseA],
            ttt_list: vec![3, 1],
            density_list: vec![20, 10],
            velocity_list: vec![50.0, 10.0],
            iterations: 1,
            master_seed: 0,
            options: RunOptions::default(),
        };
        let g = spec.grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], GridPoint { case: RouteLabel::CaseA, ttt_tics: 1, den_gnb: 10, velocity_kmh: 10.0 });
        assert_eq!(g[1].velocity_kmh, 50.0);
        assert_eq!(g[2].den_gnb, 20);
        assert_eq!(g[4].ttt_tics, 3);
        assert_eq!(g[8].case, RouteLabel::CaseB);
    }

    #[test]
    fn empty_lists_rejected() {
        let mut spec = SweepSpec::preset(Preset::Fig4, 1, 0);
        spec.density_list.clear();
        assert_eq!(spec.validate(), Err(SweepError::EmptyList("density_list")));
        let mut spec = SweepSpec::preset(Preset::Fig4, 1, 0);
        spec.velocity_list = vec![0.0];
        assert_eq!(spec.validate(), Err(SweepError::NonPositive("velocity_list")));
    }

    #[test]
    fn cell_is_deterministic() {
        let base = short_base();
        let a = run_cell(&base, &pt(1, 20), 1, 9, RunOptions::default()).unwrap();
        let b = run_cell(&base, &pt(1, 20), 1, 9, RunOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_matches_sequential() {
        let base = short_base();
        let seq = run_cell(&base, &pt(2, 30), 8, 3, RunOptions::default()).unwrap();
        let par = run_cell(
            &base,
            &pt(2, 30),
            8,
            3,
            RunOptions {
                parallel: true,
                ..RunOptions::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn seeds_key_on_grid_point() {
        let r = Route::case_b();
        let s1 = iteration_seed(5, &pt(1, 10), &r, 0, false);
        assert_ne!(s1, iteration_seed(5, &pt(2, 10), &r, 0, false));
        assert_ne!(s1, iteration_seed(5, &pt(1, 20), &r, 0, false));
        assert_ne!(s1, iteration_seed(5, &pt(1, 10), &r, 1, false));
        assert_eq!(
            iteration_seed(5, &pt(1, 10), &r, 0, true),
            iteration_seed(5, &pt(7, 10), &r, 0, true)
        );
    }

    #[test]
    fn invalid_point_propagates() {
        let mut p = pt(1, 10);
        p.velocity_kmh = -1.0;
        let err = run_cell(&short_base(), &p, 1, 0, RunOptions::default()).unwrap_err();
        assert!(err.has_field("velocity_kmh"));
    }
}
