//! Base-station patterns on a rectangular torus and Monte Carlo sampling of
//! the typical user.
//!
//! Every sample places the user uniformly on the torus and draws a fresh
//! shadowing variable for each station. Random streams are derived from a
//! `(seed, stream, chunk)` triple, so results do not depend on the number
//! of worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::model::{k_sigma, PropagationModel, ShadowingSpec};
use crate::numerics::std_normal_cdf;

/// Samples generated from one random stream.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Hexagonal,
    Poisson,
    PerturbedHexagonal,
}

/// Finite set of stations on the torus `[0, width) × [0, height)`, km.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<Point>,
    extent: (f64, f64),
    kind: PatternKind,
}

impl PointPattern {
    pub fn new(points: Vec<Point>, extent: (f64, f64), kind: PatternKind) -> Result<Self> {
        let (w, h) = extent;
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(invalid(format!("torus extent must be positive, got {w} x {h}")));
        }
        if let Some(p) = points.iter().find(|p| !(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h)) {
            return Err(invalid(format!("point ({}, {}) lies outside the torus", p.x, p.y)));
        }
        Ok(Self { points, extent, kind })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn extent(&self) -> (f64, f64) {
        self.extent
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.extent.0 * self.extent.1
    }

    /// Stations per km².
    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.area()
    }
}

/// Lattice spacing of the triangular lattice whose hexagonal cells have
/// the area of a disk of radius `r`.
pub fn hex_spacing(cell_radius_km: f64) -> f64 {
    cell_radius_km * (2.0 * PI / 3f64.sqrt()).sqrt()
}

/// Torus carrying `n_side × n_side` lattice sites: `n·D` wide and
/// `n·D·√3/2` high for spacing `D`.
pub fn hex_extent(cell_radius_km: f64, n_side: usize) -> (f64, f64) {
    let d = hex_spacing(cell_radius_km);
    let n = n_side as f64;
    (n * d, n * d * 3f64.sqrt() / 2.0)
}

fn check_hex_args(cell_radius_km: f64, n_side: usize) -> Result<()> {
    if !(cell_radius_km > 0.0) || !cell_radius_km.is_finite() {
        return Err(invalid(format!("cell radius must be positive, got {cell_radius_km}")));
    }
    if n_side < 2 || !n_side.is_multiple_of(2) {
        return Err(invalid(format!("hexagonal torus needs an even side count >= 2, got {n_side}")));
    }
    Ok(())
}

/// Triangular lattice (hexagonal cells) of `n_side²` stations with density
/// `1/(πR²)`, wrapped on a commensurate torus. Odd rows are shifted by half
/// a spacing, so the row count must be even.
pub fn hex_pattern(cell_radius_km: f64, n_side: usize) -> Result<PointPattern> {
    check_hex_args(cell_radius_km, n_side)?;
    let d = hex_spacing(cell_radius_km);
    let row = d * 3f64.sqrt() / 2.0;
    let mut points = Vec::with_capacity(n_side * n_side);
    for j in 0..n_side {
        let shift = if j % 2 == 1 { 0.5 * d } else { 0.0 };
        for i in 0..n_side {
            points.push(Point::new(i as f64 * d + shift, j as f64 * row));
        }
    }
    PointPattern::new(points, hex_extent(cell_radius_km, n_side), PatternKind::Hexagonal)
}

/// Homogeneous Poisson pattern of intensity `lambda` on the torus.
pub fn poisson_pattern<R: Rng + ?Sized>(lambda_per_km2: f64, extent: (f64, f64), rng: &mut R) -> Result<PointPattern> {
    if !(lambda_per_km2 > 0.0) || !lambda_per_km2.is_finite() {
        return Err(invalid(format!("intensity must be positive, got {lambda_per_km2}")));
    }
    let (w, h) = extent;
    if !(w > 0.0 && h > 0.0) {
        return Err(invalid(format!("torus extent must be positive, got {w} x {h}")));
    }
    let mean = lambda_per_km2 * w * h;
    let count = Poisson::new(mean).map_err(|e| invalid(format!("bad Poisson mean {mean}: {e}")))?.sample(rng) as usize;
    let points = (0..count).map(|_| Point::new(rng.random::<f64>() * w, rng.random::<f64>() * h)).collect();
    PointPattern::new(points, extent, PatternKind::Poisson)
}

/// [`hex_pattern`] with iid centred Gaussian displacements of standard
/// deviation `displacement_km` per coordinate, wrapped on the torus.
pub fn perturbed_hex_pattern<R: Rng + ?Sized>(
    cell_radius_km: f64,
    n_side: usize,
    displacement_km: f64,
    rng: &mut R,
) -> Result<PointPattern> {
    if !(displacement_km >= 0.0) || !displacement_km.is_finite() {
        return Err(invalid(format!("displacement must be >= 0, got {displacement_km}")));
    }
    let base = hex_pattern(cell_radius_km, n_side)?;
    let (w, h) = base.extent();
    let jitter = Normal::new(0.0, displacement_km).map_err(|e| invalid(e.to_string()))?;
    let points = base
        .points()
        .iter()
        .map(|p| {
            let x = wrap(p.x + jitter.sample(rng), w);
            let y = wrap(p.y + jitter.sample(rng), h);
            Point::new(x, y)
        })
        .collect();
    PointPattern::new(points, (w, h), PatternKind::PerturbedHexagonal)
}

fn wrap(v: f64, len: f64) -> f64 {
    let r = v.rem_euclid(len);
    // rem_euclid can round up to len itself.
    if r >= len {
        0.0
    } else {
        r
    }
}

#[inline]
fn wrapped_delta(d: f64, len: f64) -> f64 {
    let d = d.abs();
    d.min(len - d)
}

#[inline]
fn torus_distance_sq(p: Point, q: Point, extent: (f64, f64)) -> f64 {
    let dx = wrapped_delta(p.x - q.x, extent.0);
    let dy = wrapped_delta(p.y - q.y, extent.1);
    dx * dx + dy * dy
}

/// Euclidean distance with coordinate-wise wraparound.
pub fn torus_distance(p: Point, q: Point, extent: (f64, f64)) -> f64 {
    torus_distance_sq(p, q, extent).sqrt()
}

/// How to obtain a pattern for each Monte Carlo sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternSpec {
    Hexagonal { cell_radius_km: f64, n_side: usize },
    Poisson { lambda_per_km2: f64, extent: (f64, f64) },
    PerturbedHexagonal { cell_radius_km: f64, n_side: usize, displacement_km: f64 },
}

impl PatternSpec {
    /// A Poisson pattern with the density and torus of the given hexagonal
    /// network.
    pub fn poisson_like_hex(cell_radius_km: f64, n_side: usize) -> Self {
        PatternSpec::Poisson {
            lambda_per_km2: 1.0 / (PI * cell_radius_km * cell_radius_km),
            extent: hex_extent(cell_radius_km, n_side),
        }
    }

    /// Mean number of stations per km².
    pub fn intensity(&self) -> f64 {
        match *self {
            PatternSpec::Hexagonal { cell_radius_km, .. } | PatternSpec::PerturbedHexagonal { cell_radius_km, .. } => {
                1.0 / (PI * cell_radius_km * cell_radius_km)
            }
            PatternSpec::Poisson { lambda_per_km2, .. } => lambda_per_km2,
        }
    }

    /// Whether each sample needs a new pattern.
    pub fn is_random(&self) -> bool {
        !matches!(self, PatternSpec::Hexagonal { .. })
    }

    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointPattern> {
        match *self {
            PatternSpec::Hexagonal { cell_radius_km, n_side } => hex_pattern(cell_radius_km, n_side),
            PatternSpec::Poisson { lambda_per_km2, extent } => poisson_pattern(lambda_per_km2, extent, rng),
            PatternSpec::PerturbedHexagonal { cell_radius_km, n_side, displacement_km } => {
                perturbed_hex_pattern(cell_radius_km, n_side, displacement_km, rng)
            }
        }
    }
}

/// Observables of one typical-user realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalUserSample {
    /// Smallest propagation loss `L` (to the serving station).
    pub path_loss: f64,
    /// `f = Σ_{i ≠ serving} L / L_i`.
    pub interference_factor: f64,
    pub sir: f64,
    pub sinr: f64,
}

impl TypicalUserSample {
    /// SINR of the same realization for a different `N/P`.
    pub fn sinr_with(&self, noise_over_power: f64) -> f64 {
        1.0 / (noise_over_power * self.path_loss + self.interference_factor)
    }
}

/// Reusable state for [`sample_typical_user`].
#[derive(Debug, Clone)]
pub struct UserSampler {
    log_k_beta: f64,
    half_beta: f64,
    noise_over_power: f64,
    shadow: crate::model::LogShadowSampler,
    log_losses: Vec<f64>,
}

impl UserSampler {
    pub fn new(prop: &PropagationModel, shadow: &ShadowingSpec) -> Result<Self> {
        prop.validate()?;
        Ok(Self {
            log_k_beta: prop.beta * prop.k_per_km.ln(),
            half_beta: 0.5 * prop.beta,
            noise_over_power: prop.noise_over_power(),
            shadow: shadow.log_sampler(prop.beta)?,
            log_losses: Vec::new(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, pattern: &PointPattern, rng: &mut R) -> Result<TypicalUserSample> {
        if pattern.is_empty() {
            return Err(invalid("cannot place a typical user in an empty pattern"));
        }
        let (w, h) = pattern.extent();
        loop {
            let user = Point::new(rng.random::<f64>() * w, rng.random::<f64>() * h);
            if let Some(s) = self.sample_at(pattern, user, rng) {
                return Ok(s);
            }
        }
    }

    /// Observables for a user at `user`; `None` when a station sits exactly
    /// at the user position.
    pub fn sample_at<R: Rng + ?Sized>(
        &mut self,
        pattern: &PointPattern,
        user: Point,
        rng: &mut R,
    ) -> Option<TypicalUserSample> {
        let extent = pattern.extent();
        self.log_losses.clear();
        let mut best = f64::INFINITY;
        let mut best_idx = 0;
        for p in pattern.points() {
            let d2 = torus_distance_sq(user, *p, extent);
            if d2 == 0.0 {
                return None;
            }
            // ln L_i = β ln K + (β/2) ln d² - ln S_i
            let ll = self.log_k_beta + self.half_beta * d2.ln() - self.shadow.sample(rng);
            if ll < best {
                best = ll;
                best_idx = self.log_losses.len();
            }
            self.log_losses.push(ll);
        }
        if self.log_losses.is_empty() {
            return None;
        }
        let f: f64 =
            self.log_losses.iter().enumerate().filter(|&(i, _)| i != best_idx).map(|(_, &ll)| (best - ll).exp()).sum();
        let path_loss = best.exp();
        let sir = if f > 0.0 { 1.0 / f } else { f64::INFINITY };
        let sinr = 1.0 / (self.noise_over_power * path_loss + f);
        Some(TypicalUserSample { path_loss, interference_factor: f, sir, sinr })
    }
}

/// One typical user: uniform position on the torus, one shadowing draw per
/// station, propagation losses `(K d_i)^β / S_i` under the torus metric.
pub fn sample_typical_user<R: Rng + ?Sized>(
    pattern: &PointPattern,
    prop: &PropagationModel,
    shadow: &ShadowingSpec,
    rng: &mut R,
) -> Result<TypicalUserSample> {
    UserSampler::new(prop, shadow)?.sample(pattern, rng)
}

/// Random stream `substream` of family `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64, substream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream << 32) ^ (substream & 0xffff_ffff));
    rng
}

/// `count` independent typical-user samples, computed in parallel.
/// Random patterns are redrawn for every sample. The output depends only on
/// `(seed, stream)` and the arguments.
pub fn simulate_typical_users(
    pattern: &PatternSpec,
    prop: &PropagationModel,
    shadow: &ShadowingSpec,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<TypicalUserSample>> {
    let sampler = UserSampler::new(prop, shadow)?;
    let fixed = if pattern.is_random() {
        None
    } else {
        Some(pattern.realize(&mut stream_rng(seed, stream, u32::MAX as u64))?)
    };
    let chunks = count.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, stream, c as u64);
            let mut sampler = sampler.clone();
            let n = CHUNK.min(count - c * CHUNK);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let s = match &fixed {
                    Some(p) => sampler.sample(p, &mut rng)?,
                    None => sampler.sample(&pattern.realize(&mut rng)?, &mut rng)?,
                };
                out.push(s);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Stations taken into account: those at distance in `(inner, outer)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWindow {
    pub inner_km: f64,
    pub outer_km: f64,
}

impl TruncationWindow {
    pub fn new(inner_km: f64, outer_km: f64) -> Result<Self> {
        if !(inner_km >= 0.0 && inner_km < outer_km) {
            return Err(invalid(format!("window ({inner_km}, {outer_km}) is empty")));
        }
        Ok(Self { inner_km, outer_km })
    }

    pub fn unbounded() -> Self {
        Self { inner_km: 0.0, outer_km: f64::INFINITY }
    }

    pub fn contains(&self, d: f64) -> bool {
        d > self.inner_km && d < self.outer_km
    }
}

fn windowed_distances<'a>(
    pattern: &'a PointPattern,
    observer: Point,
    window: &'a TruncationWindow,
) -> impl Iterator<Item = f64> + 'a {
    let extent = pattern.extent();
    pattern.points().iter().map(move |p| torus_distance(observer, *p, extent)).filter(move |&d| window.contains(d))
}

/// `ln(K(σ)^β |X_i|^β / S_i)` for the stations inside `window`, distances
/// measured from `observer`; `S_i = exp(-σ²/2 + σZ_i)`.
pub fn sample_sigma_scaled_losses<R: Rng + ?Sized>(
    pattern: &PointPattern,
    observer: Point,
    k_per_km: f64,
    beta: f64,
    sigma: f64,
    window: &TruncationWindow,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let ks = k_sigma(k_per_km, beta, sigma)?;
    let normal = rand_distr::StandardNormal;
    Ok(windowed_distances(pattern, observer, window)
        .map(|d| {
            let z: f64 = rng.sample(normal);
            beta * (ks * d).ln() + 0.5 * sigma * sigma - sigma * z
        })
        .collect())
}

/// Exact expected number of values `≤ s` returned by
/// [`sample_sigma_scaled_losses`]:
/// `Σ_i G((s - β ln(K|X_i|) - σ²/β) / σ)`.
pub fn expected_log_count(
    pattern: &PointPattern,
    observer: Point,
    k_per_km: f64,
    beta: f64,
    sigma: f64,
    window: &TruncationWindow,
    s: f64,
) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(beta > 2.0) {
        return Err(invalid(format!("path-loss exponent must exceed 2, got {beta}")));
    }
    let shift = sigma * sigma / beta;
    Ok(windowed_distances(pattern, observer, window)
        .map(|d| std_normal_cdf((s - beta * (k_per_km * d).ln() - shift) / sigma))
        .sum())
}

/// Mean count of log-losses `≤ s` in the limiting Poisson process,
/// `(λπ/K²) e^{2s/β}`.
pub fn poisson_log_count(lambda_per_km2: f64, k_per_km: f64, beta: f64, s: f64) -> f64 {
    lambda_per_km2 * PI / (k_per_km * k_per_km) * (2.0 * s / beta).exp()
}
