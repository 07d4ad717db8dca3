//! Seeded synthetic data: GARCH(1,1) series, minute-level jump-diffusion
//! days with volume spikes, multi-asset universes and planted daily jumps.
//!
//! All generators are pure functions of their parameters and seed. Streams
//! run on [`ChaCha8Rng`]; independent sub-streams are keyed by
//! [`sub_seed`].
//!
//! Jumps are added to minute log-returns so prices stay positive. At minute
//! scale the difference from adding them to simple returns is negligible.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};

use crate::econometrics::{self, ArmaOptions};
use crate::marketdata::{MinuteBar, TradingDay, Venue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("GARCH parameters are not stationary: omega > 0, alpha, beta >= 0, alpha + beta < 1")]
    NonStationaryParams,
    #[error("invalid generator parameter: {0}")]
    InvalidParams(&'static str),
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// One step of the splitmix64 sequence.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` under `master`: splitmix64 advanced from
/// `master` by `stream + 1` golden-ratio increments.
pub fn sub_seed(master: u64, stream: u64) -> u64 {
    let mut s = master.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(&mut s)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Simulates `n` GARCH(1,1) innovations `e_t = sigma_t z_t`, starting from the
/// unconditional variance `omega / (1 - alpha - beta)`.
pub fn gen_garch_series(omega: f64, alpha: f64, beta: f64, n: usize, seed: u64) -> Result<Vec<f64>, SynthError> {
    let stationary = omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0 && omega.is_finite();
    if !stationary {
        return Err(SynthError::NonStationaryParams);
    }
    if n == 0 {
        return Err(SynthError::InvalidParams("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = omega / (1.0 - alpha - beta);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let e = libm::sqrt(h) * normal(&mut rng);
        out.push(e);
        h = omega + alpha * e * e + beta * h;
    }
    Ok(out)
}

/// Minute-level compound-Poisson jump diffusion with a lognormal volume process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    /// Poisson mean number of jumps per day.
    pub intensity: f64,
    pub jump_mean: f64,
    pub jump_sd: f64,
    /// Diffusive minute log-return sd.
    pub base_sigma: f64,
    pub volume_mu: f64,
    pub volume_sigma: f64,
    /// Multiplier on the amount traded in jump minutes.
    pub volume_spike: f64,
}

impl JumpParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let finite = [
            self.intensity,
            self.jump_mean,
            self.jump_sd,
            self.base_sigma,
            self.volume_mu,
            self.volume_sigma,
            self.volume_spike,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(SynthError::InvalidParams("parameters must be finite"));
        }
        if self.intensity < 0.0 {
            return Err(SynthError::InvalidParams("intensity must be >= 0"));
        }
        if self.jump_sd < 0.0 {
            return Err(SynthError::InvalidParams("jump_sd must be >= 0"));
        }
        if !(self.base_sigma > 0.0) {
            return Err(SynthError::InvalidParams("base_sigma must be > 0"));
        }
        if !(self.volume_spike > 0.0) {
            return Err(SynthError::InvalidParams("volume_spike must be > 0"));
        }
        if self.volume_sigma < 0.0 {
            return Err(SynthError::InvalidParams("volume_sigma must be >= 0"));
        }
        Ok(())
    }

    /// The same asset without jumps or volume spikes.
    pub fn without_jumps(self) -> Self {
        Self {
            intensity: 0.0,
            volume_spike: 1.0,
            ..self
        }
    }
}

impl Default for JumpParams {
    /// A 24h market hit by about eight volume-spiked jumps a day.
    fn default() -> Self {
        Self {
            intensity: 8.0,
            jump_mean: 0.0,
            jump_sd: 0.015,
            base_sigma: 0.0008,
            volume_mu: 10.0,
            volume_sigma: 0.5,
            volume_spike: 200.0,
        }
    }
}

/// Day-level inputs layered on top of [`JumpParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayDrivers {
    /// Daily log drift, spread evenly over the session.
    pub drift: f64,
    /// Multiplier on the diffusive variance.
    pub vol_scale: f64,
    /// Overrides the Poisson intensity for this day.
    pub intensity: Option<f64>,
}

impl Default for DayDrivers {
    fn default() -> Self {
        Self {
            drift: 0.0,
            vol_scale: 1.0,
            intensity: None,
        }
    }
}

/// What the generator planted on one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayTruth {
    pub ticker: String,
    pub date: NaiveDate,
    /// Session minute indices carrying a jump, ascending.
    pub jump_minutes: Vec<usize>,
    /// Sum of the day's jump sizes in log-return units.
    pub jump_sum: f64,
    /// Sum of the day's diffusive log-returns, drift included.
    pub diffusive_sum: f64,
    pub drift: f64,
    pub vol_scale: f64,
}

/// A simulated day together with its jump truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDay {
    pub day: TradingDay,
    pub truth: DayTruth,
}

/// Simulates one session with explicit drivers, starting from `open_price`.
///
/// Draw order per day is fixed: jump count, jump minutes, then for every
/// minute its diffusive shock, jump size (jump minutes only) and volume shock.
pub fn simulate_day(
    params: &JumpParams,
    venue: &Venue,
    ticker: &str,
    date: NaiveDate,
    open_price: f64,
    drivers: DayDrivers,
    rng: &mut ChaCha8Rng,
) -> Result<SimulatedDay, SynthError> {
    params.validate()?;
    if !(drivers.vol_scale > 0.0) || !drivers.drift.is_finite() {
        return Err(SynthError::InvalidParams("vol_scale must be > 0 and drift finite"));
    }
    let t = venue.session_minutes as usize;
    let intensity = drivers.intensity.unwrap_or(params.intensity);
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(SynthError::InvalidParams("intensity must be >= 0"));
    }
    let n_jumps = if intensity > 0.0 {
        let pois = Poisson::new(intensity).map_err(|_| SynthError::InvalidParams("intensity"))?;
        (pois.sample(rng) as usize).min(t)
    } else {
        0
    };
    let mut jump_minutes = index::sample(rng, t, n_jumps).into_vec();
    jump_minutes.sort_unstable();
    let mut is_jump = vec![false; t];
    for &m in &jump_minutes {
        is_jump[m] = true;
    }
    let jump_law = Normal::new(params.jump_mean, params.jump_sd).map_err(|_| SynthError::InvalidParams("jump_sd"))?;

    let sd = params.base_sigma * libm::sqrt(drivers.vol_scale);
    let step = drivers.drift / t as f64;
    let open = venue.session_open(date);
    let mut bars = Vec::with_capacity(t);
    let mut price = open_price;
    let (mut jump_sum, mut diffusive_sum) = (0.0, 0.0);
    for (m, &jumps_here) in is_jump.iter().enumerate() {
        let diffusive = step + sd * normal(rng);
        let jump = if jumps_here { jump_law.sample(rng) } else { 0.0 };
        let mut amount = libm::exp(params.volume_mu + params.volume_sigma * normal(rng));
        if jumps_here {
            amount *= params.volume_spike;
        }
        diffusive_sum += diffusive;
        jump_sum += jump;
        price *= libm::exp(diffusive + jump);
        let bar = MinuteBar::new(ticker, open + Duration::minutes(m as i64), price, amount)
            .map_err(|_| SynthError::InvalidParams("generated price left the positive range"))?;
        bars.push(bar);
    }
    Ok(SimulatedDay {
        day: TradingDay {
            ticker: String::from(ticker),
            date,
            bars,
            prev_close: Some(open_price),
        },
        truth: DayTruth {
            ticker: String::from(ticker),
            date,
            jump_minutes,
            jump_sum,
            diffusive_sum,
            drift: drivers.drift,
            vol_scale: drivers.vol_scale,
        },
    })
}

/// One seeded jump-diffusion session priced from 100.0.
pub fn gen_jump_day(
    params: &JumpParams,
    venue: &Venue,
    ticker: &str,
    date: NaiveDate,
    seed: u64,
) -> Result<TradingDay, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_day(params, venue, ticker, date, 100.0, DayDrivers::default(), &mut rng).map(|s| s.day)
}

/// Per-asset generator settings for [`gen_universe`].
///
/// On top of the minute process the diffusive variance clusters across days
/// through a unit-mean GARCH(1,1) multiplier, and the daily drift follows
/// the previous day's diffusive return with coefficient `drift_ar`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetParams {
    pub ticker: String,
    pub jump: JumpParams,
    pub vol_alpha: f64,
    pub vol_beta: f64,
    pub drift_ar: f64,
    /// Constant daily log drift added on top of the autoregressive part.
    pub drift_mean: f64,
}

impl AssetParams {
    pub fn new(ticker: impl Into<String>, jump: JumpParams) -> Self {
        Self {
            ticker: ticker.into(),
            jump,
            vol_alpha: 0.0,
            vol_beta: 0.0,
            drift_ar: 0.0,
            drift_mean: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        self.jump.validate()?;
        if !(self.vol_alpha >= 0.0 && self.vol_beta >= 0.0 && self.vol_alpha + self.vol_beta < 1.0) {
            return Err(SynthError::NonStationaryParams);
        }
        if !(self.drift_ar.abs() < 1.0) || !self.drift_mean.is_finite() {
            return Err(SynthError::InvalidParams("drift_ar must lie in (-1, 1)"));
        }
        Ok(())
    }
}

/// Default master seed of the synthetic universes.
pub const DEFAULT_UNIVERSE_SEED: u64 = 2024;

/// `n` assets sharing the default jump process, with clustered diffusive
/// variance (`a = 0.10`, `b = 0.85`) and a predictable drift.
pub fn high_jump_assets(n: usize) -> Vec<AssetParams> {
    (0..n)
        .map(|i| AssetParams {
            vol_alpha: 0.10,
            vol_beta: 0.85,
            drift_ar: 0.3,
            drift_mean: 0.0005,
            ..AssetParams::new(alloc::format!("SYN{}", i + 1), JumpParams::default())
        })
        .collect()
}

/// [`high_jump_assets`] without jumps or volume spikes.
pub fn no_jump_assets(n: usize) -> Vec<AssetParams> {
    let mut assets = high_jump_assets(n);
    for a in assets.iter_mut() {
        a.jump = a.jump.without_jumps();
    }
    assets
}

/// Days of a synthetic universe, asset-major, with their truth records.
#[derive(Debug, Clone, PartialEq)]
pub struct Universe {
    pub days: Vec<TradingDay>,
    pub truth: Vec<DayTruth>,
}

impl Universe {
    /// All minute bars ordered by time, then ticker.
    pub fn bars(&self) -> Vec<MinuteBar> {
        let mut bars: Vec<MinuteBar> = self.days.iter().flat_map(|d| d.bars.iter().cloned()).collect();
        bars.sort_by(|a, b| a.minute_start.cmp(&b.minute_start).then_with(|| a.ticker.cmp(&b.ticker)));
        bars
    }
}

/// Calendar of `days` session dates from `start`; stock venues skip weekends.
pub fn session_dates(venue: &Venue, start: NaiveDate, days: usize) -> Vec<NaiveDate> {
    let skip_weekends = venue.kind == crate::marketdata::VenueKind::Stock;
    let mut out = Vec::with_capacity(days);
    let mut d = start;
    while out.len() < days {
        if !(skip_weekends && matches!(d.weekday(), Weekday::Sat | Weekday::Sun)) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

/// Generates `days` consecutive sessions for every asset. Asset `i` draws from
/// the sub-stream `sub_seed(seed, i)`, and each asset's prices chain across days
/// from 100.0.
pub fn gen_universe(
    venue: &Venue,
    assets: &[AssetParams],
    days: usize,
    start: NaiveDate,
    seed: u64,
) -> Result<Universe, SynthError> {
    if assets.is_empty() || days == 0 {
        return Err(SynthError::InvalidParams("need at least one asset and one day"));
    }
    let dates = session_dates(venue, start, days);
    let t = venue.session_minutes as f64;
    let mut out = Universe {
        days: Vec::with_capacity(assets.len() * days),
        truth: Vec::with_capacity(assets.len() * days),
    };
    for (i, asset) in assets.iter().enumerate() {
        asset.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, i as u64));
        let base_var = asset.jump.base_sigma * asset.jump.base_sigma * t;
        let mut price = 100.0;
        let mut h = 1.0;
        let mut prev_diffusive = 0.0;
        for &date in &dates {
            let drivers = DayDrivers {
                drift: asset.drift_mean + asset.drift_ar * prev_diffusive,
                vol_scale: h,
                intensity: None,
            };
            let sim = simulate_day(&asset.jump, venue, &asset.ticker, date, price, drivers, &mut rng)?;
            price = sim.day.bars.last().map_or(price, |b| b.close);
            let shock = sim.truth.diffusive_sum - drivers.drift;
            prev_diffusive = sim.truth.diffusive_sum - asset.drift_mean;
            h = (1.0 - asset.vol_alpha - asset.vol_beta) + asset.vol_alpha * shock * shock / base_var + asset.vol_beta * h;
            out.days.push(sim.day);
            out.truth.push(sim.truth);
        }
    }
    Ok(out)
}

/// Where the baseline mean of [`plant_daily_jumps`] comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanSource {
    /// The same mean on every day.
    Constant(f64),
    /// One-step AR(1) forecast fitted on the previous `window` base returns;
    /// zero while fewer than 21 returns are available.
    RollingAr1 { window: usize },
}

/// Planted daily jump levels, one pair per day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyJumpParams {
    pub beta_jump: Vec<f64>,
    pub beta_diff: Vec<f64>,
    pub mean: MeanSource,
}

impl DailyJumpParams {
    /// Same targets on every one of `n` days.
    pub fn constant(beta_jump: f64, beta_diff: f64, n: usize, mean: MeanSource) -> Self {
        Self {
            beta_jump: vec![beta_jump; n],
            beta_diff: vec![beta_diff; n],
            mean,
        }
    }
}

/// Output of [`plant_daily_jumps`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSeries {
    pub returns: Vec<f64>,
    pub mu: Vec<f64>,
    pub jump: Vec<f64>,
}

impl PlantedSeries {
    /// The adjusted series implied by the planted jump levels, `r_t / beta_t`.
    pub fn adjusted(&self, params: &DailyJumpParams) -> Vec<f64> {
        self.returns.iter().zip(&params.beta_jump).map(|(r, b)| r / b).collect()
    }
}

/// Adds `(beta_jump - 1) * beta_diff * mu_t` to every base return.
pub fn plant_daily_jumps(base: &[f64], params: &DailyJumpParams) -> Result<PlantedSeries, SynthError> {
    let n = base.len();
    for len in [params.beta_jump.len(), params.beta_diff.len()] {
        if len != n {
            return Err(SynthError::LengthMismatch(n, len));
        }
    }
    if base.iter().any(|x| !x.is_finite()) {
        return Err(SynthError::InvalidParams("base series must be finite"));
    }
    if params.beta_jump.iter().chain(&params.beta_diff).any(|b| !(*b > 0.0) || !b.is_finite()) {
        return Err(SynthError::InvalidParams("planted betas must be positive"));
    }
    let mu: Vec<f64> = match params.mean {
        MeanSource::Constant(m) => vec![m; n],
        MeanSource::RollingAr1 { window } => (0..n)
            .map(|t| {
                let hist = &base[t.saturating_sub(window)..t];
                econometrics::fit_arma(hist, 1, 0, &ArmaOptions::default())
                    .and_then(|f| econometrics::forecast_mean(&f, hist))
                    .unwrap_or(0.0)
            })
            .collect(),
    };
    let jump: Vec<f64> = (0..n)
        .map(|t| (params.beta_jump[t] - 1.0) * params.beta_diff[t] * mu[t])
        .collect();
    let returns = base.iter().zip(&jump).map(|(r, j)| r + j).collect();
    Ok(PlantedSeries { returns, mu, jump })
}

/// A base daily series and random planted betas for [`plant_daily_jumps`].
///
/// The base is AR(1) around a 5 bp drift (`phi = 0.3`) with GARCH(1,1)
/// innovations of unit-variance 1e-4. Planted betas are lognormal, clamped to
/// `[0.1, 10]`; the mean source is a rolling 60-day AR(1) forecast.
pub fn planted_fixture(n: usize, seed: u64) -> Result<(Vec<f64>, DailyJumpParams), SynthError> {
    let e = gen_garch_series(1e-4 * 0.05, 0.10, 0.85, n, sub_seed(seed, 0))?;
    let (c, phi) = (0.0005, 0.3);
    let mut prev = c;
    let base: Vec<f64> = e
        .iter()
        .map(|e| {
            prev = c + phi * (prev - c) + e;
            prev
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 1));
    let mut draw = |sd: f64| libm::exp(sd * normal(&mut rng)).clamp(0.1, 10.0);
    let (beta_jump, beta_diff): (Vec<f64>, Vec<f64>) = (0..n).map(|_| (draw(0.5), draw(0.3))).unzip();
    Ok((
        base,
        DailyJumpParams {
            beta_jump,
            beta_diff,
            mean: MeanSource::RollingAr1 { window: 60 },
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::{minute_series, validate_day, DEFAULT_MIN_MINUTES};

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 3, 1).unwrap()
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs of splitmix64 seeded with 0 (reference C implementation)
        let mut s = 0u64;
        assert_eq!(splitmix64(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut s), 0x6E78_9E6A_A1B9_65F4);
        assert_ne!(sub_seed(7, 0), sub_seed(7, 1));
    }

    #[test]
    fn garch_series_basics() {
        let a = gen_garch_series(0.05, 0.1, 0.85, 500, 3).unwrap();
        assert_eq!(a, gen_garch_series(0.05, 0.1, 0.85, 500, 3).unwrap());
        assert_ne!(a, gen_garch_series(0.05, 0.1, 0.85, 500, 4).unwrap());
        assert_eq!(gen_garch_series(0.05, 0.5, 0.5, 10, 1), Err(SynthError::NonStationaryParams));
        assert_eq!(gen_garch_series(0.0, 0.1, 0.5, 10, 1), Err(SynthError::NonStationaryParams));
    }

    #[test]
    fn garch_series_iid_when_no_dynamics() {
        let e = gen_garch_series(2.0, 0.0, 0.0, 20_000, 5).unwrap();
        let v = crate::moments::sample_variance(&e);
        assert!((v - 2.0).abs() < 0.08, "variance {v}");
    }

    #[test]
    fn jump_day_is_deterministic_and_valid() {
        let p = JumpParams::default();
        let a = gen_jump_day(&p, &Venue::crypto(), "BTC", date(), 9).unwrap();
        assert_eq!(a, gen_jump_day(&p, &Venue::crypto(), "BTC", date(), 9).unwrap());
        assert_eq!(a.bars.len(), 1440);
        assert_eq!(a.return_count(), 1440);
        assert!(validate_day(&a, DEFAULT_MIN_MINUTES).valid);
        let s = gen_jump_day(&p, &Venue::stock(), "AAPL", date(), 9).unwrap();
        assert_eq!(s.bars.len(), 390);
        assert!(s.bars.iter().all(|b| Venue::stock().in_session(b.minute_start)));
    }

    #[test]
    fn no_jump_minute_sd_matches_base_sigma() {
        let p = JumpParams::default().without_jumps();
        let day = gen_jump_day(&p, &Venue::crypto(), "X", date(), 1).unwrap();
        let r = minute_series(&day).unwrap().returns;
        let sd = libm::sqrt(crate::moments::sample_variance(&r));
        assert!((sd / p.base_sigma - 1.0).abs() < 0.1, "sd {sd}");
    }

    #[test]
    fn spikes_land_on_jump_minutes() {
        let p = JumpParams {
            volume_sigma: 0.0,
            ..JumpParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sim = simulate_day(&p, &Venue::crypto(), "X", date(), 100.0, DayDrivers::default(), &mut rng).unwrap();
        let base = libm::exp(p.volume_mu);
        for (m, bar) in sim.day.bars.iter().enumerate() {
            let spiked = sim.truth.jump_minutes.contains(&m);
            let expect = if spiked { base * p.volume_spike } else { base };
            assert!((bar.amount / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_mean_of_jump_counts() {
        let p = JumpParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let venue = Venue::stock();
        let mut total = 0usize;
        for _ in 0..10_000 {
            let d = simulate_day(&p, &venue, "X", date(), 100.0, DayDrivers::default(), &mut rng).unwrap();
            total += d.truth.jump_minutes.len();
        }
        let mean = total as f64 / 10_000.0;
        assert!((mean / p.intensity - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = JumpParams {
            base_sigma: 0.0,
            ..JumpParams::default()
        };
        assert!(gen_jump_day(&bad, &Venue::crypto(), "X", date(), 1).is_err());
        let bad = JumpParams {
            intensity: -1.0,
            ..JumpParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn universe_shape_and_chaining() {
        let assets: Vec<AssetParams> = ["A", "B", "C"]
            .iter()
            .map(|t| AssetParams::new(*t, JumpParams::default()))
            .collect();
        let u = gen_universe(&Venue::stock(), &assets, 20, date(), 11).unwrap();
        assert_eq!(u.days.len(), 60);
        assert!(u.days.iter().all(|d| validate_day(d, DEFAULT_MIN_MINUTES).valid));
        for w in u.days.windows(2).filter(|w| w[0].ticker == w[1].ticker) {
            assert_eq!(w[1].prev_close, Some(w[0].bars.last().unwrap().close));
            assert!(w[1].date > w[0].date);
        }
        assert_eq!(u, gen_universe(&Venue::stock(), &assets, 20, date(), 11).unwrap());
    }

    #[test]
    fn planting_rules() {
        let base = [0.01, -0.02, 0.005];
        let unit = DailyJumpParams::constant(1.0, 3.0, 3, MeanSource::Constant(0.01));
        assert_eq!(plant_daily_jumps(&base, &unit).unwrap().returns, base.to_vec());
        let two = DailyJumpParams::constant(2.0, 1.0, 3, MeanSource::Constant(0.01));
        let planted = plant_daily_jumps(&base, &two).unwrap();
        assert_eq!(planted.jump, vec![0.01; 3]);
        let adj = planted.adjusted(&two);
        for (a, r) in adj.iter().zip(&planted.returns) {
            assert_eq!(*a, r / 2.0);
        }
        assert_eq!(
            plant_daily_jumps(&base, &DailyJumpParams::constant(2.0, 1.0, 2, MeanSource::Constant(0.0))),
            Err(SynthError::LengthMismatch(3, 2))
        );
    }

    #[test]
    fn rolling_mean_only_looks_back() {
        let base: Vec<f64> = gen_garch_series(1e-4, 0.0, 0.0, 80, 1).unwrap();
        let p = DailyJumpParams::constant(1.5, 1.0, 80, MeanSource::RollingAr1 { window: 40 });
        let a = plant_daily_jumps(&base, &p).unwrap();
        let mut perturbed = base.clone();
        perturbed[79] += 1.0;
        let b = plant_daily_jumps(&perturbed, &p).unwrap();
        assert_eq!(a.mu, b.mu);
        assert!(a.mu[..21].iter().all(|&m| m == 0.0));
    }
}
