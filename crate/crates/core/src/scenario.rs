//! Scenario configuration, gNB deployment and seed derivation.
//!
//! Everything a single simulated run needs that is fixed before the first
//! tic lives here: the area, the TU route, the per-site radio template, the
//! link budget constants and the handover parameters. Deployment draws a
//! fixed number of uniformly placed sites (a Poisson point process
//! conditioned on its count).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::handover::{A3Reference, HandoverParams};
use crate::radio::LinkConfig;

/// Tolerance used when checking a route heading against its endpoints.
pub const HEADING_TOLERANCE_DEG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaSpec {
    pub width_m: f64,
    pub height_m: f64,
}

impl Default for AreaSpec {
    fn default() -> Self {
        Self {
            width_m: 1000.0,
            height_m: 1000.0,
        }
    }
}

impl AreaSpec {
    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.width_m).contains(&p.x) && (0.0..=self.height_m).contains(&p.y)
    }

    pub fn area_km2(&self) -> f64 {
        self.width_m * self.height_m / 1e6
    }
}

/// Radio parameters shared by every deployed gNB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteTemplate {
    pub height_m: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub coverage_m: f64,
}

impl Default for SiteTemplate {
    fn default() -> Self {
        Self {
            height_m: 15.0,
            tx_power_dbm: 30.0,
            antenna_gain_dbi: 15.0,
            coverage_m: 300.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnbSite {
    pub id: usize,
    pub position: Point,
    pub height_m: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub coverage_m: f64,
}

impl GnbSite {
    pub fn new(id: usize, position: Point, template: &SiteTemplate) -> Self {
        Self {
            id,
            position,
            height_m: template.height_m,
            tx_power_dbm: template.tx_power_dbm,
            antenna_gain_dbi: template.antenna_gain_dbi,
            coverage_m: template.coverage_m,
        }
    }

    pub fn covers(&self, p: &Point) -> bool {
        self.position.distance(p) <= self.coverage_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RouteLabel {
    CaseA,
    CaseB,
    Custom,
}

impl RouteLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RouteLabel::CaseA => "A",
            RouteLabel::CaseB => "B",
            RouteLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for RouteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RouteLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(RouteLabel::CaseA),
            "B" | "b" => Ok(RouteLabel::CaseB),
            "custom" => Ok(RouteLabel::Custom),
            other => Err(format!("unknown route `{other}` (expected A, B or custom)")),
        }
    }
}

/// Straight-line TU route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub label: RouteLabel,
    pub start: Point,
    pub end: Point,
    pub heading_deg: f64,
}

impl Route {
    /// Diagonal route from the bottom-right to the top-left corner, θ = 135°.
    pub fn case_a() -> Self {
        Self {
            label: RouteLabel::CaseA,
            start: Point::new(1000.0, 0.0),
            end: Point::new(0.0, 1000.0),
            heading_deg: 135.0,
        }
    }

    /// Horizontal route across the middle of the area, θ = 180°.
    pub fn case_b() -> Self {
        Self {
            label: RouteLabel::CaseB,
            start: Point::new(1000.0, 500.0),
            end: Point::new(0.0, 500.0),
            heading_deg: 180.0,
        }
    }

    /// Custom route; the heading is derived from the endpoints.
    pub fn custom(start: Point, end: Point) -> Self {
        Self {
            label: RouteLabel::Custom,
            start,
            end,
            heading_deg: heading_between(&start, &end),
        }
    }

    pub fn preset(label: RouteLabel) -> Option<Self> {
        match label {
            RouteLabel::CaseA => Some(Self::case_a()),
            RouteLabel::CaseB => Some(Self::case_b()),
            RouteLabel::Custom => None,
        }
    }

    pub fn length_m(&self) -> f64 {
        self.start.distance(&self.end)
    }
}

/// Heading of `end - start` in degrees, normalised to [0, 360).
pub fn heading_between(start: &Point, end: &Point) -> f64 {
    let deg = (end.y - start.y).atan2(end.x - start.x).to_degrees();
    if deg < 0.0 {
        deg + 360.0
    } else {
        deg
    }
}

fn angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub area: AreaSpec,
    /// gNBs per km²; the deployment holds exactly `den_gnb * area_km2` sites.
    pub den_gnb: u32,
    pub route: Route,
    pub velocity_kmh: f64,
    pub run_time_ms: u64,
    pub tic_ms: u64,
    pub iterations: u32,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area: AreaSpec::default(),
            den_gnb: 10,
            route: Route::case_a(),
            velocity_kmh: 50.0,
            run_time_ms: 70_000,
            tic_ms: 10,
            iterations: 100,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn velocity_mps(&self) -> f64 {
        self.velocity_kmh / 3.6
    }

    pub fn num_tics(&self) -> u64 {
        self.run_time_ms / self.tic_ms
    }

    pub fn gnb_count(&self) -> usize {
        (f64::from(self.den_gnb) * self.area.area_km2()).round() as usize
    }
}

/// Full parameter set of a simulation: scenario, deployment template, link
/// budget and handover algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub site: SiteTemplate,
    pub link: LinkConfig,
    pub handover: HandoverParams,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// All invariant violations found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ConfigErrors(pub Vec<FieldError>);

impl ConfigErrors {
    pub fn has_field(&self, field: &str) -> bool {
        self.0.iter().any(|e| e.field == field)
    }
}

/// A [`SimConfig`] whose invariants have been checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidConfig(SimConfig);

impl ValidConfig {
    pub fn get(&self) -> &SimConfig {
        &self.0
    }

    pub fn into_inner(self) -> SimConfig {
        self.0
    }
}

impl std::ops::Deref for ValidConfig {
    type Target = SimConfig;

    fn deref(&self) -> &SimConfig {
        &self.0
    }
}

pub fn validate_config(cfg: SimConfig) -> Result<ValidConfig, ConfigErrors> {
    let mut errs = Vec::new();
    let mut push = |field: &'static str, message: String| errs.push(FieldError { field, message });

    let sc = &cfg.scenario;
    if !(sc.area.width_m > 0.0 && sc.area.height_m > 0.0)
        || !sc.area.width_m.is_finite()
        || !sc.area.height_m.is_finite()
    {
        push(
            "area_m",
            format!(
                "area must be positive, got {}x{}",
                sc.area.width_m, sc.area.height_m
            ),
        );
    }
    if sc.den_gnb == 0 {
        push("den_gnb", "density must be a positive integer".into());
    }
    if !(sc.velocity_kmh > 0.0 && sc.velocity_kmh.is_finite()) {
        push(
            "velocity_kmh",
            format!("velocity must be positive, got {}", sc.velocity_kmh),
        );
    }
    if sc.tic_ms == 0 {
        push("tic_ms", "tic length must be positive".into());
    } else if sc.run_time_ms % sc.tic_ms != 0 {
        push(
            "run_time_ms",
            format!(
                "run time {} ms is not a multiple of the {} ms tic",
                sc.run_time_ms, sc.tic_ms
            ),
        );
    }
    if sc.iterations == 0 {
        push("iterations", "at least one iteration is required".into());
    }

    let route = &sc.route;
    if route.start == route.end {
        push("route", "start and end points coincide".into());
    } else {
        let expected = heading_between(&route.start, &route.end);
        if angle_diff_deg(expected, route.heading_deg) > HEADING_TOLERANCE_DEG {
            push(
                "route",
                format!(
                    "heading {}° does not match endpoints ({expected}°)",
                    route.heading_deg
                ),
            );
        }
    }
    if let Some(preset) = Route::preset(route.label) {
        if preset.start != route.start || preset.end != route.end {
            push(
                "route",
                format!("route {} endpoints differ from the preset", route.label),
            );
        }
    }

    if !(cfg.site.coverage_m > 0.0) {
        push("gnb_coverage_m", "coverage must be positive".into());
    }
    if !(cfg.link.bandwidth_hz > 0.0) {
        push("bandwidth_hz", "bandwidth must be positive".into());
    }
    if !(cfg.link.min_distance_m > 0.0) {
        push("min_distance_m", "distance floor must be positive".into());
    }
    if !(cfg.link.shadowing_sigma_db >= 0.0) {
        push("shadowing_sigma_db", "sigma must be non-negative".into());
    }

    let ho = &cfg.handover;
    if ho.ttt_tics == 0 {
        push("ttt_tics", "time-to-trigger must be at least one tic".into());
    }
    if ho.sinr_min_db != cfg.link.sinr_min_db {
        push(
            "sinr_min_db",
            "link and handover SINR thresholds disagree".into(),
        );
    }
    if ho.avg_window == 0 {
        push("avg_window", "averaging window must hold at least one sample".into());
    }

    if errs.is_empty() {
        Ok(ValidConfig(cfg))
    } else {
        Err(ConfigErrors(errs))
    }
}

/// Draws `count` sites uniformly over `area` with ids `0..count`.
pub fn place_gnbs<R: Rng + ?Sized>(
    area: &AreaSpec,
    count: usize,
    template: &SiteTemplate,
    rng: &mut R,
) -> Vec<GnbSite> {
    (0..count)
        .map(|id| {
            let x = rng.random::<f64>() * area.width_m;
            let y = rng.random::<f64>() * area.height_m;
            GnbSite::new(id, Point::new(x, y), template)
        })
        .collect()
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finaliser; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a master seed and a key path into a stream seed.
///
/// For a fixed prefix the map from the last component to the output is a
/// bijection, so seeds never collide along any single key axis.
pub fn seed_for(master_seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix64(master_seed), |acc, &k| {
        mix64(acc.wrapping_add(mix64(k.wrapping_add(GOLDEN_GAMMA))))
    })
}

pub fn derive_iteration_seed(master_seed: u64, iteration: u64) -> u64 {
    seed_for(master_seed, &[iteration])
}

// ---------------------------------------------------------------------------
// key = value config file
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("endpoint keys require `route = custom`")]
    EndpointsWithPreset,
    #[error("`route = custom` requires start_x_m, start_y_m, end_x_m and end_y_m")]
    MissingEndpoints,
}

/// Recognised config keys, in canonical output order.
pub const CONFIG_KEYS: &[&str] = &[
    "area_m",
    "den_gnb",
    "route",
    "start_x_m",
    "start_y_m",
    "end_x_m",
    "end_y_m",
    "velocity_kmh",
    "run_time_ms",
    "tic_ms",
    "iterations",
    "seed",
    "carrier_ghz",
    "bandwidth_hz",
    "noise_figure_db",
    "tx_power_dbm",
    "gnb_antenna_gain_dbi",
    "rx_antenna_gain_dbi",
    "gnb_coverage_m",
    "gnb_height_m",
    "sinr_min_db",
    "shadowing_sigma_db",
    "fast_fading",
    "min_distance_m",
    "a3_reference",
];

fn parse_num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ParseError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| ParseError::Value {
        line,
        key: key.to_string(),
        message: e.to_string(),
    })
}

fn parse_area(line: usize, v: &str) -> Result<AreaSpec, ParseError> {
    match v.split_once('x') {
        Some((w, h)) => Ok(AreaSpec {
            width_m: parse_num(line, "area_m", w.trim())?,
            height_m: parse_num(line, "area_m", h.trim())?,
        }),
        None => {
            let side = parse_num(line, "area_m", v)?;
            Ok(AreaSpec {
                width_m: side,
                height_m: side,
            })
        }
    }
}

impl SimConfig {
    /// Parses a config file on top of the defaults. Values are not
    /// validated; call [`validate_config`] afterwards.
    pub fn from_config_str(text: &str) -> Result<Self, ParseError> {
        let mut cfg = SimConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut route_label: Option<RouteLabel> = None;
        let mut endpoints: [Option<f64>; 4] = [None; 4];

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ParseError::Syntax { line })?;
            let key = *CONFIG_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ParseError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
            if seen.contains(&key) {
                return Err(ParseError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key);

            let sc = &mut cfg.scenario;
            match key {
                "area_m" => sc.area = parse_area(line, value)?,
                "den_gnb" => sc.den_gnb = parse_num(line, key, value)?,
                "route" => {
                    route_label = Some(value.parse().map_err(|message| ParseError::Value {
                        line,
                        key: key.to_string(),
                        message,
                    })?)
                }
                "start_x_m" => endpoints[0] = Some(parse_num(line, key, value)?),
                "start_y_m" => endpoints[1] = Some(parse_num(line, key, value)?),
                "end_x_m" => endpoints[2] = Some(parse_num(line, key, value)?),
                "end_y_m" => endpoints[3] = Some(parse_num(line, key, value)?),
                "velocity_kmh" => sc.velocity_kmh = parse_num(line, key, value)?,
                "run_time_ms" => sc.run_time_ms = parse_num(line, key, value)?,
                "tic_ms" => sc.tic_ms = parse_num(line, key, value)?,
                "iterations" => sc.iterations = parse_num(line, key, value)?,
                "seed" => sc.seed = parse_num(line, key, value)?,
                "carrier_ghz" => cfg.link.carrier_ghz = parse_num(line, key, value)?,
                "bandwidth_hz" => cfg.link.bandwidth_hz = parse_num(line, key, value)?,
                "noise_figure_db" => cfg.link.noise_figure_db = parse_num(line, key, value)?,
                "tx_power_dbm" => cfg.site.tx_power_dbm = parse_num(line, key, value)?,
                "gnb_antenna_gain_dbi" => {
                    cfg.site.antenna_gain_dbi = parse_num(line, key, value)?
                }
                "rx_antenna_gain_dbi" => {
                    cfg.link.rx_antenna_gain_dbi = parse_num(line, key, value)?
                }
                "gnb_coverage_m" => cfg.site.coverage_m = parse_num(line, key, value)?,
                "gnb_height_m" => cfg.site.height_m = parse_num(line, key, value)?,
                "sinr_min_db" => {
                    let v = parse_num(line, key, value)?;
                    cfg.link.sinr_min_db = v;
                    cfg.handover.sinr_min_db = v;
                }
                "shadowing_sigma_db" => {
                    cfg.link.shadowing_sigma_db = parse_num(line, key, value)?
                }
                "fast_fading" => {
                    cfg.link.fast_fading = match value {
                        "0" => false,
                        "1" => true,
                        _ => {
                            return Err(ParseError::Value {
                                line,
                                key: key.to_string(),
                                message: "expected 0 or 1".into(),
                            })
                        }
                    }
                }
                "min_distance_m" => cfg.link.min_distance_m = parse_num(line, key, value)?,
                "a3_reference" => {
                    cfg.handover.a3_reference =
                        value.parse().map_err(|message| ParseError::Value {
                            line,
                            key: key.to_string(),
                            message,
                        })?
                }
                _ => unreachable!("key list and match arms out of sync"),
            }
        }

        let any_endpoint = endpoints.iter().any(Option::is_some);
        match route_label.unwrap_or(RouteLabel::CaseA) {
            RouteLabel::Custom => match endpoints {
                [Some(sx), Some(sy), Some(ex), Some(ey)] => {
                    cfg.scenario.route = Route::custom(Point::new(sx, sy), Point::new(ex, ey))
                }
                _ => return Err(ParseError::MissingEndpoints),
            },
            preset => {
                if any_endpoint {
                    return Err(ParseError::EndpointsWithPreset);
                }
                cfg.scenario.route = Route::preset(preset).expect("preset route");
            }
        }
        Ok(cfg)
    }

    /// Renders every key in canonical order. Parsing the output yields an
    /// identical config.
    pub fn to_config_string(&self) -> String {
        let sc = &self.scenario;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        if sc.area.width_m == sc.area.height_m {
            put("area_m", sc.area.width_m.to_string());
        } else {
            put("area_m", format!("{}x{}", sc.area.width_m, sc.area.height_m));
        }
        put("den_gnb", sc.den_gnb.to_string());
        put("route", sc.route.label.to_string());
        if sc.route.label == RouteLabel::Custom {
            put("start_x_m", sc.route.start.x.to_string());
            put("start_y_m", sc.route.start.y.to_string());
            put("end_x_m", sc.route.end.x.to_string());
            put("end_y_m", sc.route.end.y.to_string());
        }
        put("velocity_kmh", sc.velocity_kmh.to_string());
        put("run_time_ms", sc.run_time_ms.to_string());
        put("tic_ms", sc.tic_ms.to_string());
        put("iterations", sc.iterations.to_string());
        put("seed", sc.seed.to_string());
        put("carrier_ghz", self.link.carrier_ghz.to_string());
        put("bandwidth_hz", self.link.bandwidth_hz.to_string());
        put("noise_figure_db", self.link.noise_figure_db.to_string());
        put("tx_power_dbm", self.site.tx_power_dbm.to_string());
        put("gnb_antenna_gain_dbi", self.site.antenna_gain_dbi.to_string());
        put("rx_antenna_gain_dbi", self.link.rx_antenna_gain_dbi.to_string());
        put("gnb_coverage_m", self.site.coverage_m.to_string());
        put("gnb_height_m", self.site.height_m.to_string());
        put("sinr_min_db", self.link.sinr_min_db.to_string());
        put("shadowing_sigma_db", self.link.shadowing_sigma_db.to_string());
        put("fast_fading", u8::from(self.link.fast_fading).to_string());
        put("min_distance_m", self.link.min_distance_m.to_string());
        put("a3_reference", self.handover.a3_reference.to_string());
        out
    }
}

impl FromStr for A3Reference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "avg" => Ok(A3Reference::Average),
            "instant" => Ok(A3Reference::Instant),
            other => Err(format!("unknown a3_reference `{other}` (expected avg or instant)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_deployment() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(place_gnbs(&AreaSpec::default(), 0, &SiteTemplate::default(), &mut rng).is_empty());
    }

    #[test]
    fn twenty_sites_in_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let area = AreaSpec::default();
        let sites = place_gnbs(&area, 20, &SiteTemplate::default(), &mut rng);
        assert_eq!(sites.len(), 20);
        for (i, s) in sites.iter().enumerate() {
            assert_eq!(s.id, i);
            assert!(area.contains(&s.position));
            assert_eq!(s.coverage_m, 300.0);
        }
    }

    #[test]
    fn placement_is_reproducible() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            place_gnbs(&AreaSpec::default(), 20, &SiteTemplate::default(), &mut rng)
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn quadrant_uniformity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sites = place_gnbs(&AreaSpec::default(), 10_000, &SiteTemplate::default(), &mut rng);
        let mut counts = [0usize; 4];
        for s in &sites {
            let q = usize::from(s.position.x >= 500.0) + 2 * usize::from(s.position.y >= 500.0);
            counts[q] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - 2500.0).powi(2) / 2500.0)
            .sum();
        for c in counts {
            let share = c as f64 / 10_000.0;
            assert!((share - 0.25).abs() <= 0.02, "quadrant share {share}");
        }
        // 3 dof, p = 0.001
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn iteration_seeds() {
        assert_eq!(derive_iteration_seed(7, 0), derive_iteration_seed(7, 0));
        assert_ne!(derive_iteration_seed(7, 0), derive_iteration_seed(7, 1));
        let mut seeds: Vec<u64> = (0..100).map(|i| derive_iteration_seed(7, i)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = validate_config(SimConfig::default()).unwrap();
        assert!((cfg.scenario.velocity_mps() - 13.89).abs() < 0.005);
        assert_eq!(cfg.scenario.num_tics(), 7000);
        assert_eq!(cfg.scenario.gnb_count(), 10);
    }

    #[test]
    fn run_time_must_divide() {
        let mut cfg = SimConfig::default();
        cfg.scenario.run_time_ms = 70_005;
        let err = validate_config(cfg).unwrap_err();
        assert!(err.has_field("run_time_ms"), "{err}");
    }

    #[test]
    fn heading_mismatch() {
        let mut cfg = SimConfig::default();
        cfg.scenario.route.heading_deg = 90.0;
        let err = validate_config(cfg).unwrap_err();
        assert!(err.has_field("route"), "{err}");
    }

    #[test]
    fn negative_velocity_reported_with_other_errors() {
        let mut cfg = SimConfig::default();
        cfg.scenario.velocity_kmh = -5.0;
        cfg.scenario.iterations = 0;
        let err = validate_config(cfg).unwrap_err();
        assert!(err.has_field("velocity_kmh"));
        assert!(err.has_field("iterations"));
    }

    #[test]
    fn preset_headings_match_endpoints() {
        for r in [Route::case_a(), Route::case_b()] {
            assert!(angle_diff_deg(heading_between(&r.start, &r.end), r.heading_deg) < 1e-9);
        }
    }

    #[test]
    fn parse_with_comments() {
        let text = "# scenario\nden_gnb = 30  # dense\nroute = B\nvelocity_kmh=20\n\nfast_fading = 1\n";
        let cfg = SimConfig::from_config_str(text).unwrap();
        assert_eq!(cfg.scenario.den_gnb, 30);
        assert_eq!(cfg.scenario.route, Route::case_b());
        assert_eq!(cfg.scenario.velocity_kmh, 20.0);
        assert!(cfg.link.fast_fading);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = SimConfig::from_config_str("den_gnb = 10\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, ParseError::UnknownKey { line: 2, .. }));
    }

    #[test]
    fn custom_route_needs_all_endpoints() {
        let err = SimConfig::from_config_str("route = custom\nstart_x_m = 0\n").unwrap_err();
        assert!(matches!(err, ParseError::MissingEndpoints));
        let err = SimConfig::from_config_str("route = A\nstart_x_m = 0\n").unwrap_err();
        assert!(matches!(err, ParseError::EndpointsWithPreset));
        let cfg = SimConfig::from_config_str(
            "route = custom\nstart_x_m = 0\nstart_y_m = 0\nend_x_m = 0\nend_y_m = 800\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario.route.heading_deg, 90.0);
    }
}
