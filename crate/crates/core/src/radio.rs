//! Downlink link budget and geometry (SINR) evaluation.
//!
//! Received powers are combined in the linear milliwatt domain. Only gNBs
//! whose coverage radius contains the TU take part in a measurement; all
//! others are neither candidates nor interferers.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::scenario::{GnbSite, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Informational only; the pathloss model has no frequency term.
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub thermal_noise_dbm_per_hz: f64,
    pub rx_antenna_gain_dbi: f64,
    pub sinr_min_db: f64,
    /// Pathloss distance floor.
    pub min_distance_m: f64,
    /// Standard deviation of the per-measurement log-normal shadowing draw.
    pub shadowing_sigma_db: f64,
    /// Per-measurement Rayleigh fading on every link.
    pub fast_fading: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            carrier_ghz: 6.0,
            bandwidth_hz: 10e6,
            noise_figure_db: 7.0,
            thermal_noise_dbm_per_hz: -174.0,
            rx_antenna_gain_dbi: 0.0,
            sinr_min_db: -7.0,
            min_distance_m: 1.0,
            shadowing_sigma_db: 0.0,
            fast_fading: false,
        }
    }
}

impl LinkConfig {
    pub fn is_deterministic(&self) -> bool {
        self.shadowing_sigma_db == 0.0 && !self.fast_fading
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// `128.1 + 37.6 log10(d_km)` with `d` floored at `min_distance_m`.
pub fn pathloss_db(distance_m: f64, cfg: &LinkConfig) -> f64 {
    let d_km = distance_m.max(cfg.min_distance_m) / 1000.0;
    128.1 + 37.6 * d_km.log10()
}

pub fn noise_power_dbm(cfg: &LinkConfig) -> f64 {
    cfg.thermal_noise_dbm_per_hz + linear_to_db(cfg.bandwidth_hz) + cfg.noise_figure_db
}

/// Random channel loss in dB for one link at one measurement instant.
fn channel_loss_db<R: Rng + ?Sized>(cfg: &LinkConfig, rng: &mut R) -> f64 {
    let mut loss = 0.0;
    if cfg.shadowing_sigma_db > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        loss += cfg.shadowing_sigma_db * z;
    }
    if cfg.fast_fading {
        // Rayleigh amplitude => exponentially distributed power gain.
        let g: f64 = Exp1.sample(rng);
        loss -= linear_to_db(g);
    }
    loss
}

/// Received power at `tu_pos` from `site`. Random terms are drawn only when
/// enabled in `cfg`, so the deterministic configuration never touches `rng`.
pub fn received_power_dbm<R: Rng + ?Sized>(
    site: &GnbSite,
    tu_pos: &Point,
    cfg: &LinkConfig,
    rng: &mut R,
) -> f64 {
    let d = site.position.distance(tu_pos);
    let mut p = site.tx_power_dbm + site.antenna_gain_dbi + cfg.rx_antenna_gain_dbi
        - pathloss_db(d, cfg);
    if !cfg.is_deterministic() {
        p -= channel_loss_db(cfg, rng);
    }
    p
}

/// Received power of every covering site, in site order.
pub fn covering_powers<R: Rng + ?Sized>(
    tu_pos: &Point,
    sites: &[GnbSite],
    cfg: &LinkConfig,
    rng: &mut R,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    covering_powers_into(tu_pos, sites, cfg, rng, &mut out);
    out
}

fn covering_powers_into<R: Rng + ?Sized>(
    tu_pos: &Point,
    sites: &[GnbSite],
    cfg: &LinkConfig,
    rng: &mut R,
    out: &mut Vec<(usize, f64)>,
) {
    out.clear();
    out.extend(
        sites
            .iter()
            .filter(|s| s.covers(tu_pos))
            .map(|s| (s.id, received_power_dbm(s, tu_pos, cfg, rng))),
    );
}

/// Geometry of each covering site treated as the serving cell, computed from
/// one set of power samples.
struct Powers {
    total_mw: f64,
    noise_mw: f64,
}

impl Powers {
    fn new(per_gnb: &[(usize, f64)], cfg: &LinkConfig) -> Self {
        Self {
            total_mw: per_gnb.iter().map(|&(_, p)| db_to_linear(p)).sum(),
            noise_mw: db_to_linear(noise_power_dbm(cfg)),
        }
    }

    fn geometry_db(&self, p_dbm: f64) -> f64 {
        let p = db_to_linear(p_dbm);
        let interference = (self.total_mw - p).max(0.0);
        linear_to_db(p / (interference + self.noise_mw))
    }
}

fn serving_geometry(per_gnb: &[(usize, f64)], serving_id: usize, powers: &Powers) -> Option<f64> {
    per_gnb
        .iter()
        .find(|&&(id, _)| id == serving_id)
        .map(|&(_, p)| powers.geometry_db(p))
}

fn best_of(per_gnb: &[(usize, f64)], powers: &Powers) -> Option<BestCell> {
    let mut best: Option<BestCell> = None;
    for &(id, p) in per_gnb {
        let geo = powers.geometry_db(p);
        let better = match best {
            None => true,
            Some(b) => geo > b.geo_db || (geo == b.geo_db && id < b.gnb_id),
        };
        if better {
            best = Some(BestCell { gnb_id: id, geo_db: geo });
        }
    }
    best
}

/// Geometry of the TU w.r.t. `serving_id`, or `None` when the serving site
/// does not cover the TU.
pub fn geometry_db<R: Rng + ?Sized>(
    tu_pos: &Point,
    serving_id: usize,
    sites: &[GnbSite],
    cfg: &LinkConfig,
    rng: &mut R,
) -> Option<f64> {
    let per_gnb = covering_powers(tu_pos, sites, cfg, rng);
    let powers = Powers::new(&per_gnb, cfg);
    serving_geometry(&per_gnb, serving_id, &powers)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub gnb_id: usize,
    pub geo_db: f64,
}

/// Covering site with the highest geometry; ties go to the lowest id.
pub fn best_geometry<R: Rng + ?Sized>(
    tu_pos: &Point,
    sites: &[GnbSite],
    cfg: &LinkConfig,
    rng: &mut R,
) -> Option<BestCell> {
    let per_gnb = covering_powers(tu_pos, sites, cfg, rng);
    let powers = Powers::new(&per_gnb, cfg);
    best_of(&per_gnb, &powers)
}

/// One tic worth of measurements.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeometryReport {
    pub tic: u64,
    /// `(gnb_id, received_power_dbm)` for covering sites, in id order.
    pub per_gnb: Vec<(usize, f64)>,
    /// `None` when detached or outside the serving cell's coverage.
    pub serving_geo_db: Option<f64>,
    pub best: Option<BestCell>,
}

impl GeometryReport {
    pub fn best_gnb(&self) -> Option<usize> {
        self.best.map(|b| b.gnb_id)
    }

    pub fn best_geo_db(&self) -> Option<f64> {
        self.best.map(|b| b.geo_db)
    }
}

/// Measures every covering site once and derives serving and best geometry
/// from the same samples.
pub fn measure<R: Rng + ?Sized>(
    tic: u64,
    tu_pos: &Point,
    sites: &[GnbSite],
    serving_id: Option<usize>,
    cfg: &LinkConfig,
    rng: &mut R,
) -> GeometryReport {
    let mut report = GeometryReport::default();
    measure_into(tic, tu_pos, sites, serving_id, cfg, rng, &mut report);
    report
}

/// [`measure`] writing into an existing report to reuse its buffer.
pub fn measure_into<R: Rng + ?Sized>(
    tic: u64,
    tu_pos: &Point,
    sites: &[GnbSite],
    serving_id: Option<usize>,
    cfg: &LinkConfig,
    rng: &mut R,
    report: &mut GeometryReport,
) {
    covering_powers_into(tu_pos, sites, cfg, rng, &mut report.per_gnb);
    let powers = Powers::new(&report.per_gnb, cfg);
    report.tic = tic;
    report.serving_geo_db = serving_id.and_then(|id| serving_geometry(&report.per_gnb, id, &powers));
    report.best = best_of(&report.per_gnb, &powers);
}

/// Re-evaluates the serving geometry of `report` against a different cell
/// using the same power samples.
pub fn geometry_from_report(report: &GeometryReport, serving_id: usize, cfg: &LinkConfig) -> Option<f64> {
    let powers = Powers::new(&report.per_gnb, cfg);
    serving_geometry(&report.per_gnb, serving_id, &powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::SiteTemplate;
    use proptest::prelude::{prop_assert, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn site(id: usize, x: f64, y: f64) -> GnbSite {
        GnbSite::new(id, Point::new(x, y), &SiteTemplate::default())
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    const ORIGIN: Point = Point::new(0.0, 0.0);

    #[test]
    fn pathloss_values() {
        let cfg = LinkConfig::default();
        assert!((pathloss_db(1000.0, &cfg) - 128.1).abs() < 1e-9);
        assert!((pathloss_db(100.0, &cfg) - 90.5).abs() < 1e-9);
        assert!((pathloss_db(0.0, &cfg) - 15.3).abs() < 1e-9);
        assert_eq!(pathloss_db(0.0, &cfg), pathloss_db(0.5, &cfg));
    }

    #[test]
    fn noise_values() {
        let mut cfg = LinkConfig::default();
        assert!((noise_power_dbm(&cfg) + 97.0).abs() < 1e-9);
        cfg.bandwidth_hz = 20e6;
        assert!((noise_power_dbm(&cfg) + 93.98970004336019).abs() < 1e-9);
        cfg.bandwidth_hz = 1.0;
        cfg.noise_figure_db = 0.0;
        assert_eq!(noise_power_dbm(&cfg), -174.0);
    }

    #[test]
    fn received_power_values() {
        let cfg = LinkConfig::default();
        let p = received_power_dbm(&site(0, 100.0, 0.0), &ORIGIN, &cfg, &mut rng());
        assert!((p + 45.5).abs() < 1e-9);
        // beyond coverage the link budget is still defined
        let p = received_power_dbm(&site(0, 1000.0, 0.0), &ORIGIN, &cfg, &mut rng());
        assert!((p + 83.1).abs() < 1e-9);
    }

    #[test]
    fn single_cell_geometry() {
        let cfg = LinkConfig::default();
        let g = geometry_db(&ORIGIN, 0, &[site(0, 100.0, 0.0)], &cfg, &mut rng()).unwrap();
        assert!((g - 51.5).abs() < 1e-9);
    }

    #[test]
    fn two_cell_geometry() {
        let cfg = LinkConfig::default();
        let sites = [site(0, 100.0, 0.0), site(1, -200.0, 0.0)];
        let g = geometry_db(&ORIGIN, 0, &sites, &cfg, &mut rng()).unwrap();
        let p_i = 10f64.powf(-4.55);
        let p_k = 10f64.powf((45.0 - (128.1 + 37.6 * 0.2f64.log10())) / 10.0);
        let expect = 10.0 * (p_i / (p_k + 10f64.powf(-9.7))).log10();
        assert!((g - expect).abs() < 1e-9);
        assert!((g - 11.32).abs() < 0.01, "{g}");
    }

    #[test]
    fn coverage_boundary() {
        let cfg = LinkConfig::default();
        assert!(geometry_db(&ORIGIN, 0, &[site(0, 301.0, 0.0)], &cfg, &mut rng()).is_none());
        assert!(geometry_db(&ORIGIN, 0, &[site(0, 300.0, 0.0)], &cfg, &mut rng()).is_some());
    }

    #[test]
    fn best_cell_selection() {
        let cfg = LinkConfig::default();
        let one = [site(4, 50.0, 0.0)];
        assert_eq!(best_geometry(&ORIGIN, &one, &cfg, &mut rng()).unwrap().gnb_id, 4);

        let two = [site(0, -200.0, 0.0), site(1, 100.0, 0.0)];
        let b = best_geometry(&ORIGIN, &two, &cfg, &mut rng()).unwrap();
        assert_eq!(b.gnb_id, 1);
        let other = geometry_db(&ORIGIN, 0, &two, &cfg, &mut rng()).unwrap();
        assert!(b.geo_db > other);

        assert!(best_geometry(&ORIGIN, &[site(0, 500.0, 0.0)], &cfg, &mut rng()).is_none());
        assert!(best_geometry(&ORIGIN, &[], &cfg, &mut rng()).is_none());
    }

    #[test]
    fn tie_goes_to_lowest_id() {
        let cfg = LinkConfig::default();
        let sites = [site(0, 0.0, 100.0), site(1, 100.0, 0.0), site(2, -100.0, 0.0)];
        let b = best_geometry(&ORIGIN, &sites[1..], &cfg, &mut rng()).unwrap();
        assert_eq!(b.gnb_id, 1);
        let b = best_geometry(&ORIGIN, &sites, &cfg, &mut rng()).unwrap();
        assert_eq!(b.gnb_id, 0);
    }

    #[test]
    fn report_fields() {
        let cfg = LinkConfig::default();
        let sites = [site(0, 100.0, 0.0), site(1, -200.0, 0.0), site(2, 900.0, 0.0)];
        let r = measure(5, &ORIGIN, &sites, Some(0), &cfg, &mut rng());
        assert_eq!(r.tic, 5);
        assert_eq!(r.per_gnb.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(r.best_gnb(), Some(0));
        assert_eq!(r.serving_geo_db, r.best_geo_db());

        let dead = measure(0, &ORIGIN, &sites[2..], Some(2), &cfg, &mut rng());
        assert!(dead.best.is_none());
        assert!(dead.serving_geo_db.is_none());
    }

    #[test]
    fn deterministic_channel_leaves_rng_untouched() {
        let cfg = LinkConfig::default();
        let mut a = rng();
        let _ = received_power_dbm(&site(0, 10.0, 0.0), &ORIGIN, &cfg, &mut a);
        assert_eq!(a.random::<u64>(), rng().random::<u64>());
    }

    #[test]
    fn fading_draws_vary() {
        let cfg = LinkConfig {
            fast_fading: true,
            shadowing_sigma_db: 4.0,
            ..LinkConfig::default()
        };
        let s = site(0, 100.0, 0.0);
        let mut r = rng();
        let a = received_power_dbm(&s, &ORIGIN, &cfg, &mut r);
        let b = received_power_dbm(&s, &ORIGIN, &cfg, &mut r);
        assert_ne!(a, b);
    }

    #[test]
    fn rayleigh_fading_mean_power_is_unbiased() {
        let cfg = LinkConfig {
            fast_fading: true,
            ..LinkConfig::default()
        };
        let s = site(0, 100.0, 0.0);
        let mut r = rng();
        let n = 200_000;
        let mean_lin: f64 = (0..n)
            .map(|_| db_to_linear(received_power_dbm(&s, &ORIGIN, &cfg, &mut r)))
            .sum::<f64>()
            / n as f64;
        assert!((linear_to_db(mean_lin) + 45.5).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn db_round_trip(p in -300.0f64..300.0) {
            prop_assert!((linear_to_db(db_to_linear(p)) - p).abs() < 1e-9);
        }

        #[test]
        fn geometry_falls_with_serving_distance(d1 in 1.0f64..290.0, dd in 0.5f64..10.0, ix in -250.0f64..250.0) {
            let cfg = LinkConfig::default();
            let interferer = site(1, ix, 150.0);
            let near = [site(0, d1, 0.0), interferer];
            let far = [site(0, d1 + dd, 0.0), interferer];
            let g_near = geometry_db(&ORIGIN, 0, &near, &cfg, &mut rng()).unwrap();
            let g_far = geometry_db(&ORIGIN, 0, &far, &cfg, &mut rng()).unwrap();
            prop_assert!(g_far < g_near);
        }

        #[test]
        fn interferer_never_helps(sx in -200.0f64..200.0, ix in -290.0f64..290.0, iy in -50.0f64..50.0) {
            let cfg = LinkConfig::default();
            let alone = [site(0, sx, 10.0)];
            let both = [site(0, sx, 10.0), site(1, ix, iy)];
            let g1 = geometry_db(&ORIGIN, 0, &alone, &cfg, &mut rng()).unwrap();
            let g2 = geometry_db(&ORIGIN, 0, &both, &cfg, &mut rng()).unwrap();
            prop_assert!(g2 <= g1);
        }
    }
}
