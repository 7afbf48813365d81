//! Seedable random primitives for the simulation lab.
//!
//! Everything here honors one contract: the pair `(master_seed, stream_id)`
//! fully determines every draw. Replicate `i` of an experiment always runs
//! on stream `i`, so results are bit-identical no matter how many workers
//! execute the replicates or in which order they finish.
//!
//! Provided samplers:
//! * homogeneous Poisson point process in a centered box `[-n, n]^d`,
//! * Pareto weights `P(W > w) = w^{-beta}` and their conditioned variants
//!   (above / below a level), all by inverse CDF,
//! * zero-truncated Poisson counts (the exact hub-count law),
//! * uniform directions on the unit sphere,
//! * Palm augmentation (adding a distinguished vertex at the origin).

use model_core::ModelParams;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("conditioning level must satisfy {requirement}, got {level}")]
    InvalidLevel {
        level: f64,
        requirement: &'static str,
    },
}

/// SplitMix64 step; the standard 64-bit finalizer used to expand a seed.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic substream: ChaCha12 keyed by hashing
/// `master_seed || stream_id` through SplitMix64.
///
/// Distinct stream ids give statistically independent streams without any
/// inter-worker coordination; a stream is owned by exactly one worker at a
/// time.
#[derive(Debug, Clone)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut state = master_seed ^ 0xA076_1D64_78BD_642F;
        let mut seed = [0u8; 32];
        // fold the stream id in before expanding, so streams differ in
        // every word of the key
        state = state.wrapping_add(stream_id.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            master_seed,
            stream_id,
            rng: ChaCha12Rng::from_seed(seed),
        }
    }

    /// Uniform draw on the half-open interval `(0, 1]` (never zero), the
    /// form needed by inverse-CDF samplers with `U^{-1/beta}`.
    #[inline]
    pub fn uniform_pos(&mut self) -> f64 {
        1.0 - self.rng.gen::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Axis-aligned centered observation window `[-half_width, half_width]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub d: u32,
    pub half_width: f64,
}

impl Window {
    pub fn new(d: u32, half_width: f64) -> Self {
        Self { d, half_width }
    }
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.d as i32)
    }
    /// Half the Euclidean diameter, `half_width * sqrt(d)`: the farthest a
    /// window point can be from the origin.
    pub fn circumradius(&self) -> f64 {
        self.half_width * (f64::from(self.d)).sqrt()
    }
    pub fn contains(&self, point: &[f64]) -> bool {
        point.iter().all(|x| x.abs() <= self.half_width)
    }
}

/// A finite marked configuration: points of `R^d` (flattened, row-major)
/// with one weight `>= 1` per point.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedConfiguration {
    pub window: Window,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl MarkedConfiguration {
    pub fn new(window: Window) -> Self {
        Self {
            window,
            coords: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn dim(&self) -> usize {
        self.window.d as usize
    }
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn push(&mut self, point: &[f64], weight: f64) {
        debug_assert_eq!(point.len(), self.dim());
        debug_assert!(weight >= 1.0);
        debug_assert!(self.window.contains(point));
        self.coords.extend_from_slice(point);
        self.weights.push(weight);
    }

    /// Squared Euclidean distance from point `i` to an external location.
    #[inline]
    pub fn dist2_to(&self, i: usize, y: &[f64]) -> f64 {
        self.point(i)
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Poisson(mean) count; exact inversion for small means, `rand_distr`
/// otherwise.
pub fn sample_poisson_count(mean: f64, rng: &mut RngStream) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 30.0 {
        // exact sequential inversion
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u: f64 = rng.gen();
        while u > cdf && k < 10_000 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    } else {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    }
}

/// Homogeneous Poisson point process of intensity `rho` in `window`:
/// Poisson(rho * vol) many i.i.d. uniform points. Returns flattened
/// coordinates.
pub fn sample_ppp(window: Window, rho: f64, rng: &mut RngStream) -> Vec<f64> {
    let vol = window.volume();
    if vol <= 0.0 || rho <= 0.0 {
        return Vec::new();
    }
    let count = sample_poisson_count(rho * vol, rng) as usize;
    let d = window.d as usize;
    let mut coords = Vec::with_capacity(count * d);
    for _ in 0..count * d {
        let u: f64 = rng.gen();
        coords.push((2.0 * u - 1.0) * window.half_width);
    }
    coords
}

/// Pareto weight, `P(W > w) = w^{-beta}` for `w >= 1`, by inverse CDF.
#[inline]
pub fn sample_pareto(beta: f64, rng: &mut RngStream) -> f64 {
    rng.uniform_pos().powf(-1.0 / beta)
}

/// Pareto conditioned above `level >= 1`; by self-similarity this is
/// `level * Pareto(beta)` in law.
pub fn sample_pareto_above(
    beta: f64,
    level: f64,
    rng: &mut RngStream,
) -> Result<f64, SamplingError> {
    if !(level >= 1.0) {
        return Err(SamplingError::InvalidLevel {
            level,
            requirement: "level >= 1",
        });
    }
    Ok(level * sample_pareto(beta, rng))
}

/// Pareto conditioned to `[1, level]`, CDF `(1 - w^{-beta})/(1 - level^{-beta})`.
pub fn sample_pareto_below(
    beta: f64,
    level: f64,
    rng: &mut RngStream,
) -> Result<f64, SamplingError> {
    if !(level > 1.0) {
        return Err(SamplingError::InvalidLevel {
            level,
            requirement: "level > 1",
        });
    }
    let u: f64 = rng.gen();
    let tail_at_level = level.powf(-beta);
    Ok((1.0 - u * (1.0 - tail_at_level)).powf(-1.0 / beta))
}

/// Zero-truncated Poisson, `P(k) = e^{-mu} mu^k / (k! (1 - e^{-mu}))`,
/// `k >= 1`. Inversion for `mu < 30` (the only regime the experiments
/// reach, since `mu = (2n)^d d_n^{-beta} -> 0`), rejection otherwise.
pub fn sample_zero_truncated_poisson(mu: f64, rng: &mut RngStream) -> u64 {
    assert!(mu > 0.0, "zero-truncated Poisson needs mu > 0");
    if mu < 30.0 {
        let norm = -(-mu).exp_m1(); // 1 - e^{-mu}, stable for tiny mu
        let mut k = 1u64;
        let mut p = mu * (-mu).exp() / norm;
        let mut cdf = p;
        let u: f64 = rng.gen();
        while u > cdf && k < 10_000 {
            k += 1;
            p *= mu / k as f64;
            cdf += p;
        }
        k
    } else {
        loop {
            let k = sample_poisson_count(mu, rng);
            if k >= 1 {
                return k;
            }
        }
    }
}

/// Uniform direction on the unit sphere of `R^d` (normalized Gaussians).
pub fn sample_sphere_direction(d: u32, rng: &mut RngStream) -> Vec<f64> {
    assert!(d >= 1);
    if d == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Weight law for the distinguished origin vertex of [`palm_augment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginWeightLaw {
    Pareto,
    /// Pareto conditioned above the given level (hub planting).
    ParetoAbove(f64),
}

/// Palm augmentation: for a Poisson process, the configuration seen from a
/// typical vertex is the original process plus an independent point at the
/// origin. Appends the origin with a freshly drawn weight.
pub fn palm_augment(
    config: &mut MarkedConfiguration,
    law: OriginWeightLaw,
    beta: f64,
    rng: &mut RngStream,
) -> Result<(), SamplingError> {
    let weight = match law {
        OriginWeightLaw::Pareto => sample_pareto(beta, rng),
        OriginWeightLaw::ParetoAbove(level) => sample_pareto_above(beta, level, rng)?,
    };
    let origin = vec![0.0; config.dim()];
    config.push(&origin, weight);
    Ok(())
}

/// Sample the full marked configuration of the model in the window:
/// PPP positions plus i.i.d. Pareto weights.
pub fn sample_marked_configuration(
    p: &ModelParams,
    half_width: f64,
    rng: &mut RngStream,
) -> MarkedConfiguration {
    let window = Window::new(p.d, half_width);
    let coords = sample_ppp(window, p.rho, rng);
    let d = window.d as usize;
    let count = coords.len() / d;
    let weights = (0..count).map(|_| sample_pareto(p.beta, rng)).collect();
    MarkedConfiguration {
        window,
        coords,
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn stream(id: u64) -> RngStream {
        RngStream::new(0x5EED_CAFE, id)
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut s = stream(7);
            (0..32).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = stream(7);
            (0..32).map(|_| s.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut s = stream(8);
            (0..32).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ppp_zero_volume_is_empty() {
        let mut s = stream(0);
        assert!(sample_ppp(Window::new(1, 0.0), 1.0, &mut s).is_empty());
    }

    #[test]
    fn ppp_count_mean_matches_intensity() {
        // E[count] = (2n)^d = 20 for d=1, n=10; 1e5 draws, 3 sigma
        let mut s = stream(1);
        let w = Window::new(1, 10.0);
        let reps = 100_000;
        let total: u64 = (0..reps)
            .map(|_| (sample_ppp(w, 1.0, &mut s).len()) as u64)
            .sum();
        let mean = total as f64 / reps as f64;
        let sigma = (20.0f64 / reps as f64).sqrt();
        assert!((mean - 20.0).abs() < 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn pareto_tail_and_mean() {
        // P(W > 2) = 0.25 for beta = 2; empirical mean ~ beta/(beta-1) = 2
        let mut s = stream(2);
        let reps = 100_000;
        let draws: Vec<f64> = (0..reps).map(|_| sample_pareto(2.0, &mut s)).collect();
        let frac_above_2 = draws.iter().filter(|w| **w > 2.0).count() as f64 / reps as f64;
        let se_tail = (0.25f64 * 0.75 / reps as f64).sqrt();
        assert!((frac_above_2 - 0.25).abs() < 3.0 * se_tail);

        let mean = draws.iter().sum::<f64>() / reps as f64;
        let var = draws.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / reps as f64;
        let se_mean = (var / reps as f64).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se_mean, "mean={mean} se={se_mean}");
    }

    #[test]
    fn pareto_above_is_scaled_pareto() {
        // two-sample KS at significance 0.001 over 1e4 draws per side
        let mut s = stream(3);
        let n = 10_000;
        let mut a: Vec<f64> = (0..n)
            .map(|_| sample_pareto_above(2.0, 5.0, &mut s).unwrap() / 5.0)
            .collect();
        let mut b: Vec<f64> = (0..n).map(|_| sample_pareto(2.0, &mut s)).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let mut ks = 0.0f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        // c(0.001) * sqrt((n+m)/(n m)) with c(0.001) ~ 1.949
        let crit = 1.949 * (2.0 / n as f64).sqrt();
        assert!(ks < crit, "ks={ks} crit={crit}");
    }

    #[test]
    fn pareto_conditioned_supports() {
        let mut s = stream(4);
        for _ in 0..1_000_000 {
            let above = sample_pareto_above(0.7, 3.0, &mut s).unwrap();
            assert!(above > 3.0 * (1.0 - 1e-12));
            let below = sample_pareto_below(0.7, 3.0, &mut s).unwrap();
            assert!((1.0..=3.0 * (1.0 + 1e-12)).contains(&below));
        }
        assert!(sample_pareto_above(1.0, 0.5, &mut s).is_err());
        assert!(sample_pareto_below(1.0, 1.0, &mut s).is_err());
    }

    #[test]
    fn pareto_above_self_similarity() {
        // P(W > 2 level | W > level) = 2^{-beta}
        let mut s = stream(5);
        let (beta, level) = (1.5, 4.0);
        let reps = 100_000;
        let hits = (0..reps)
            .filter(|_| sample_pareto_above(beta, level, &mut s).unwrap() > 2.0 * level)
            .count() as f64;
        let p = 2.0f64.powf(-beta);
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((hits / reps as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn zero_truncated_poisson_law() {
        let mut s = stream(6);
        // mu -> 0: always 1
        for _ in 0..1000 {
            assert_eq!(sample_zero_truncated_poisson(1e-9, &mut s), 1);
        }
        // P(k >= 2) = 1 - mu e^{-mu}/(1-e^{-mu}); at mu=0.01 this is ~0.004992
        let mu = 0.01f64;
        let p_ge2 = 1.0 - mu * (-mu).exp() / -(-mu).exp_m1();
        assert_relative_eq!(p_ge2, mu / 2.0, max_relative = 2e-3);

        // empirical mean ~ mu/(1-e^{-mu}) within 3 sigma, mu = 2
        let mu = 2.0f64;
        let reps = 100_000;
        let draws: Vec<u64> = (0..reps)
            .map(|_| sample_zero_truncated_poisson(mu, &mut s))
            .collect();
        let expect = mu / -(-mu).exp_m1();
        let mean = draws.iter().sum::<u64>() as f64 / reps as f64;
        let var = draws
            .iter()
            .map(|&k| (k as f64 - mean).powi(2))
            .sum::<f64>()
            / reps as f64;
        assert!((mean - expect).abs() < 3.0 * (var / reps as f64).sqrt());
        assert!(draws.iter().all(|&k| k >= 1));
    }

    #[test]
    fn sphere_direction_is_unit_and_symmetric() {
        let mut s = stream(7);
        for d in 1..=3u32 {
            let reps = 100_000;
            let mut coord_sums = vec![0.0f64; d as usize];
            for _ in 0..reps {
                let v = sample_sphere_direction(d, &mut s);
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
                for (acc, x) in coord_sums.iter_mut().zip(&v) {
                    *acc += x;
                }
            }
            // per-coordinate variance is 1/d; mean within 3 sigma of 0
            let se = (1.0 / (f64::from(d) * reps as f64)).sqrt();
            for acc in coord_sums {
                assert!((acc / reps as f64).abs() < 3.0 * se);
            }
        }
    }

    #[test]
    fn palm_augment_appends_origin() {
        let mut s = stream(8);
        let mut config = MarkedConfiguration::new(Window::new(2, 5.0));
        palm_augment(&mut config, OriginWeightLaw::Pareto, 2.0, &mut s).unwrap();
        assert_eq!(config.len(), 1);
        assert_eq!(config.point(0), &[0.0, 0.0]);

        let before = config.len();
        palm_augment(&mut config, OriginWeightLaw::ParetoAbove(50.0), 2.0, &mut s).unwrap();
        assert_eq!(config.len(), before + 1);
        assert!(config.weight(1) > 50.0);
    }

    #[test]
    fn marked_configuration_respects_window() {
        let p = ModelParams::new(2, 3.5, 2.0, 1.0);
        let mut s = stream(9);
        let config = sample_marked_configuration(&p, 4.0, &mut s);
        for i in 0..config.len() {
            assert!(config.window.contains(config.point(i)));
            assert!(config.weight(i) >= 1.0);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn truncated_samplers_stay_in_support(
                seed in any::<u64>(),
                beta in 0.3f64..4.0,
                level in 1.0001f64..100.0,
            ) {
                let mut s = RngStream::new(seed, 0);
                for _ in 0..64 {
                    prop_assert!(sample_pareto_above(beta, level, &mut s).unwrap() >= level * (1.0 - 1e-12));
                    let w = sample_pareto_below(beta, level, &mut s).unwrap();
                    prop_assert!(w >= 1.0 && w <= level * (1.0 + 1e-12));
                    prop_assert!(sample_pareto(beta, &mut s) >= 1.0);
                }
            }

            #[test]
            fn identical_streams_identical_draws(seed in any::<u64>(), id in any::<u64>()) {
                let mut a = RngStream::new(seed, id);
                let mut b = RngStream::new(seed, id);
                for _ in 0..16 {
                    prop_assert_eq!(
                        rand::RngCore::next_u64(&mut a),
                        rand::RngCore::next_u64(&mut b)
                    );
                }
            }
        }
    }
}
