//! Cellular beamforming simulator.
//!
//! Base stations sit at the centers of a hexagonal cell layout and reuse the
//! same frequency; each serves the single user walking the edges of its own
//! cell. Users head for a cell corner shared with adjacent cells, meet it at
//! the gather tick, then walk on around the hexagon, so interference peaks
//! mid-period and the whole pattern repeats every period.
//!
//! Per station-user pair the channel is a sum of fixed-direction multipath
//! components with Gauss-Markov fading coefficients and distance pathloss.
//! An action picks one beam pattern per station (directional shapes times
//! power levels, plus off); the per-station rewards are the Shannon
//! throughputs `log2(1 + SINR)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::encoding::{Action, ActionSpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct WirelessConfig {
    /// Stations/cells: 1 (isolated), 7 (center + one ring), or 19 (+ second ring).
    pub n_cells: usize,
    /// Hexagon circumradius in meters.
    pub cell_radius_m: f64,
    /// Antenna elements per station.
    pub n_antenna: usize,
    /// Multipath components per station-user pair.
    pub n_paths: usize,
    /// Fading self-correlation per tick.
    pub rho: f64,
    /// SNR in dB of a fully matched max-power beam at the cell edge with no
    /// interference; fixes the noise power.
    pub edge_snr_db: f64,
    /// Pathloss intercept in dB at 1 km.
    pub pathloss_fixed_db: f64,
    /// Pathloss slope in dB per decade of distance.
    pub pathloss_slope_db: f64,
    /// Ticks per trajectory loop.
    pub period_ticks: u64,
    /// Tick at which users reach their meeting corners.
    pub gather_tick: u64,
    /// Directional beam shapes in the codebook.
    pub n_shapes: usize,
    /// Transmit power levels (squared weight norms); the off pattern is
    /// appended automatically.
    pub power_levels: Vec<f64>,
}

impl Default for WirelessConfig {
    fn default() -> Self {
        WirelessConfig {
            n_cells: 7,
            cell_radius_m: 200.0,
            n_antenna: 3,
            n_paths: 4,
            rho: 0.90,
            edge_snr_db: 10.0,
            pathloss_fixed_db: 120.9,
            pathloss_slope_db: 37.6,
            period_ticks: 6000,
            gather_tick: 2000,
            n_shapes: 4,
            power_levels: vec![1.0, 0.5],
        }
    }
}

impl WirelessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells == 0 || self.n_cells > 19 {
            return Err(Error::InvalidConfig(
                "wireless.n_cells must be between 1 and 19".into(),
            ));
        }
        if self.n_antenna == 0 || self.n_paths == 0 || self.n_shapes == 0 {
            return Err(Error::InvalidConfig(
                "antenna, path, and shape counts must be >= 1".into(),
            ));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::InvalidConfig("wireless.rho must be in [-1, 1]".into()));
        }
        if self.power_levels.is_empty() || self.power_levels.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidConfig(
                "power levels must be positive (off is implicit)".into(),
            ));
        }
        if self.gather_tick == 0 || self.gather_tick >= self.period_ticks {
            return Err(Error::InvalidConfig(
                "need 0 < gather_tick < period_ticks".into(),
            ));
        }
        if !(self.cell_radius_m > 0.0) {
            return Err(Error::InvalidConfig("cell radius must be positive".into()));
        }
        Ok(())
    }

    /// Beam patterns per station: shapes x power levels, plus off.
    pub fn n_patterns(&self) -> usize {
        self.n_shapes * self.power_levels.len() + 1
    }
}

/// One user's walk: around its hexagon, out to the meeting corner by the
/// gather tick (3 edges), then the remaining 3 edges home by the period end.
#[derive(Clone, Debug)]
struct UserPath {
    /// Hexagon corners in walk order, absolute coordinates.
    vertices: [(f64, f64); 6],
    /// Index into `vertices` of the meeting corner.
    meet: usize,
}

impl UserPath {
    fn position(&self, tick: u64, period: u64, gather: u64) -> (f64, f64) {
        let tm = tick % period;
        let start = (self.meet + 3) % 6;
        let (base, progress) = if tm < gather {
            (start, 3.0 * tm as f64 / gather as f64)
        } else {
            (
                self.meet,
                3.0 * (tm - gather) as f64 / (period - gather) as f64,
            )
        };
        let edge = (progress.floor() as usize).min(2);
        let frac = progress - edge as f64;
        let a = self.vertices[(base + edge) % 6];
        let b = self.vertices[(base + edge + 1) % 6];
        (a.0 + frac * (b.0 - a.0), a.1 + frac * (b.1 - a.1))
    }
}

/// Per-tick snapshot for offline visualization.
#[derive(Clone, Debug, Serialize)]
pub struct WirelessSnapshot {
    pub t: u64,
    /// User positions in meters.
    pub users: Vec<(f64, f64)>,
    /// Norm of each station's own-pair channel vector.
    pub own_channel_mag: Vec<f64>,
    /// Beam pattern indices of the supplied action.
    pub beams: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct WirelessEnv {
    cfg: WirelessConfig,
    stations: Vec<(f64, f64)>,
    paths: Vec<UserPath>,
    /// Codebook: `n_patterns` weight vectors of `n_antenna` entries.
    codebook: Vec<Vec<Complex64>>,
    /// Multipath steering parameters, `[i][j][p]` flattened.
    path_dirs: Vec<f64>,
    /// Fading coefficients, same layout as `path_dirs`.
    fading: Vec<Complex64>,
    /// Composed channels, `[i][j][element]` flattened.
    channels: Vec<Complex64>,
    sigma2: f64,
    tick: u64,
    rng: ChaCha8Rng,
}

/// Hexagonal cell-center layout: origin, then rings of 6 and 12.
fn hex_centers(n: usize, radius: f64) -> Vec<(f64, f64)> {
    let spacing = 3.0f64.sqrt() * radius;
    let axial_to_xy = |q: i64, r: i64| {
        (
            spacing * (q as f64 + r as f64 / 2.0),
            spacing * 3.0f64.sqrt() / 2.0 * r as f64,
        )
    };
    let mut cells = vec![(0.0, 0.0)];
    let ring_dirs: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    for ring in 1..=2i64 {
        // Start at (ring, -ring)... walk each side.
        let (mut q, mut r) = (ring, 0i64);
        for &(dq, dr) in &ring_dirs[2..].iter().chain(&ring_dirs[..2]).copied().collect::<Vec<_>>() {
            for _ in 0..ring {
                cells.push(axial_to_xy(q, r));
                q += dq;
                r += dr;
            }
        }
    }
    cells.truncate(n);
    cells
}

/// Hexagon corner `k` of the cell centered at `c` (pointy-top layout).
fn hex_vertex(c: (f64, f64), radius: f64, k: usize) -> (f64, f64) {
    let angle = PI / 6.0 + PI / 3.0 * k as f64;
    (c.0 + radius * angle.cos(), c.1 + radius * angle.sin())
}

/// Pick one meeting corner per cell so corners shared by the most cells are
/// used first, forming groups of up to three adjacent users.
fn assign_meeting_corners(centers: &[(f64, f64)], radius: f64) -> Vec<usize> {
    let key = |p: (f64, f64)| ((p.0 * 1000.0).round() as i64, (p.1 * 1000.0).round() as i64);
    let mut by_vertex: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (cell, &c) in centers.iter().enumerate() {
        for k in 0..6 {
            by_vertex
                .entry(key(hex_vertex(c, radius, k)))
                .or_default()
                .push((cell, k));
        }
    }
    let mut entries: Vec<((i64, i64), Vec<(usize, usize)>)> = by_vertex.into_iter().collect();
    entries.sort_by_key(|(k, _)| *k);

    // Repeatedly take the corner covering the most still-unassigned cells,
    // so shared corners fill up as triples/pairs before singletons appear.
    let mut chosen = vec![usize::MAX; centers.len()];
    loop {
        let mut best: Option<(usize, usize)> = None; // (count, entry index)
        for (idx, (_, members)) in entries.iter().enumerate() {
            let count = members
                .iter()
                .filter(|(cell, _)| chosen[*cell] == usize::MAX)
                .count();
            if count > 0 && best.is_none_or(|(bc, _)| count > bc) {
                best = Some((count, idx));
            }
        }
        match best {
            None => break,
            Some((_, idx)) => {
                for &(cell, k) in &entries[idx].1 {
                    if chosen[cell] == usize::MAX {
                        chosen[cell] = k;
                    }
                }
            }
        }
    }
    chosen
}

fn steering(u: f64, n_antenna: usize) -> Vec<Complex64> {
    (0..n_antenna)
        .map(|m| Complex64::from_polar(1.0, PI * u * m as f64))
        .collect()
}

fn complex_standard_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl WirelessEnv {
    /// Build an environment. `structure_seed` fixes the black box itself
    /// (multipath geometry); `fading_seed` drives the per-trial fading
    /// realization.
    pub fn new(cfg: WirelessConfig, structure_seed: u64, fading_seed: u64) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n_cells;
        let stations = hex_centers(n, cfg.cell_radius_m);
        let corners = assign_meeting_corners(&stations, cfg.cell_radius_m);
        let paths = stations
            .iter()
            .zip(&corners)
            .map(|(&c, &meet)| UserPath {
                vertices: std::array::from_fn(|k| hex_vertex(c, cfg.cell_radius_m, k)),
                meet,
            })
            .collect();

        // Codebook: shape-major within each power level, off last.
        let mut codebook = Vec::with_capacity(cfg.n_patterns());
        for &power in &cfg.power_levels {
            for b in 0..cfg.n_shapes {
                let u = -1.0 + (2.0 * b as f64 + 1.0) / cfg.n_shapes as f64;
                let scale = (power / cfg.n_antenna as f64).sqrt();
                codebook.push(
                    steering(u, cfg.n_antenna)
                        .into_iter()
                        .map(|a| a * scale)
                        .collect(),
                );
            }
        }
        codebook.push(vec![Complex64::new(0.0, 0.0); cfg.n_antenna]);

        let mut structure_rng = ChaCha8Rng::seed_from_u64(structure_seed);
        let path_dirs: Vec<f64> = (0..n * n * cfg.n_paths)
            .map(|_| {
                use rand::Rng;
                structure_rng.random_range(-1.0..1.0)
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(fading_seed);
        let fading: Vec<Complex64> = (0..n * n * cfg.n_paths)
            .map(|_| complex_standard_normal(&mut rng))
            .collect();

        let p_max = cfg
            .power_levels
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let edge_loss = pathloss_linear(&cfg, cfg.cell_radius_m);
        let sigma2 = edge_loss * p_max * cfg.n_antenna as f64
            / 10f64.powf(cfg.edge_snr_db / 10.0);

        let mut env = WirelessEnv {
            cfg,
            stations,
            paths,
            codebook,
            path_dirs,
            fading,
            channels: Vec::new(),
            sigma2,
            tick: 0,
            rng,
        };
        env.compose_channels();
        Ok(env)
    }

    pub fn config(&self) -> &WirelessConfig {
        &self.cfg
    }

    pub fn n_rewards(&self) -> usize {
        self.cfg.n_cells
    }

    pub fn noise_power(&self) -> f64 {
        self.sigma2
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// The discrete action space: one beam-pattern choice per station.
    pub fn action_space(&self) -> ActionSpace {
        ActionSpace::uniform(self.cfg.n_cells, self.cfg.n_patterns())
            .expect("pattern count >= 2")
    }

    /// Weight vector of a codebook pattern.
    pub fn beam_weights(&self, pattern: usize) -> &[Complex64] {
        &self.codebook[pattern]
    }

    pub fn user_position(&self, user: usize, tick: u64) -> (f64, f64) {
        self.paths[user].position(tick, self.cfg.period_ticks, self.cfg.gather_tick)
    }

    pub fn station_position(&self, station: usize) -> (f64, f64) {
        self.stations[station]
    }

    /// Current fading coefficient of one multipath component.
    pub fn fading_coefficient(&self, station: usize, user: usize, path: usize) -> Complex64 {
        let np = self.cfg.n_paths;
        self.fading[(station * self.cfg.n_cells + user) * np + path]
    }

    fn channel(&self, station: usize, user: usize) -> &[Complex64] {
        let na = self.cfg.n_antenna;
        let base = (station * self.cfg.n_cells + user) * na;
        &self.channels[base..base + na]
    }

    fn compose_channels(&mut self) {
        let n = self.cfg.n_cells;
        let na = self.cfg.n_antenna;
        let np = self.cfg.n_paths;
        let norm = 1.0 / (np as f64).sqrt();
        self.channels = vec![Complex64::new(0.0, 0.0); n * n * na];
        for i in 0..n {
            for j in 0..n {
                let user = self.user_position(j, self.tick);
                let dx = user.0 - self.stations[i].0;
                let dy = user.1 - self.stations[i].1;
                let dist = (dx * dx + dy * dy).sqrt();
                let gain = pathloss_linear(&self.cfg, dist).sqrt() * norm;
                let pair = (i * n + j) * np;
                let out = &mut self.channels[(i * n + j) * na..(i * n + j + 1) * na];
                for p in 0..np {
                    let g = self.fading[pair + p];
                    let u = self.path_dirs[pair + p];
                    for (m, h) in out.iter_mut().enumerate() {
                        *h += g * Complex64::from_polar(gain, PI * u * m as f64);
                    }
                }
            }
        }
    }

    /// `|h† w|²`: received power at `user` from `station` using `pattern`.
    fn received_power(&self, station: usize, user: usize, pattern: usize) -> f64 {
        let h = self.channel(station, user);
        let w = &self.codebook[pattern];
        let mut acc = Complex64::new(0.0, 0.0);
        for (hv, wv) in h.iter().zip(w) {
            acc += hv.conj() * wv;
        }
        acc.norm_sqr()
    }

    /// Per-station throughputs of `action` against the current channels.
    pub fn throughputs(&self, action: &Action) -> Result<Vec<f64>> {
        let space = self.action_space();
        if !space.contains(action) {
            return Err(Error::invalid("action not valid for this environment"));
        }
        let n = self.cfg.n_cells;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let own = self.received_power(k, k, action.values[k]);
            let mut interference = 0.0;
            for j in 0..n {
                if j != k {
                    interference += self.received_power(j, k, action.values[j]);
                }
            }
            let sinr = own / (interference + self.sigma2);
            out.push((1.0 + sinr).log2());
        }
        Ok(out)
    }

    /// Advance one tick: users move and every fading coefficient takes a
    /// Gauss-Markov step `g <- rho·g + sqrt(1-rho²)·eps`.
    pub fn advance(&mut self) {
        self.tick += 1;
        let rho = self.cfg.rho;
        let innovation = (1.0 - rho * rho).max(0.0).sqrt();
        for g in &mut self.fading {
            *g = rho * *g + innovation * complex_standard_normal(&mut self.rng);
        }
        self.compose_channels();
    }

    /// Observe the rewards of `action`, then advance the environment.
    pub fn step(&mut self, action: &Action) -> Result<Vec<f64>> {
        let c = self.throughputs(action)?;
        self.advance();
        Ok(c)
    }

    /// Per-station argmax of own received power over the codebook, ties to
    /// the lowest pattern index. Ignores interference entirely.
    pub fn greedy_action(&self) -> Action {
        let n = self.cfg.n_cells;
        let values = (0..n)
            .map(|k| {
                let mut best = 0;
                let mut best_power = f64::NEG_INFINITY;
                for pattern in 0..self.cfg.n_patterns() {
                    let p = self.received_power(k, k, pattern);
                    if p > best_power {
                        best_power = p;
                        best = pattern;
                    }
                }
                best
            })
            .collect();
        Action::new(values)
    }

    pub fn snapshot(&self, action: &Action) -> WirelessSnapshot {
        WirelessSnapshot {
            t: self.tick,
            users: (0..self.cfg.n_cells)
                .map(|j| self.user_position(j, self.tick))
                .collect(),
            own_channel_mag: (0..self.cfg.n_cells)
                .map(|k| self.channel(k, k).iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt())
                .collect(),
            beams: action.values.clone(),
        }
    }
}

fn pathloss_linear(cfg: &WirelessConfig, distance_m: f64) -> f64 {
    let d_km = (distance_m.max(1.0)) / 1000.0;
    let db = cfg.pathloss_fixed_db + cfg.pathloss_slope_db * d_km.log10();
    10f64.powf(-db / 10.0)
}
