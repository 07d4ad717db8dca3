//! Run configuration: a TOML file, command-line overrides and defaults.
//!
//! Precedence is flag, then file, then default. Relative paths in a config
//! file are resolved against the file's directory; relative paths given as
//! flags are resolved against the working directory.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use chrono::NaiveDate;
use liqarch_core::backtest::{OrderSelection, MIN_WINDOW_LEN};
use liqarch_core::econometrics::MAX_ORDER;
use liqarch_core::liquidity::{DEFAULT_BETA_CAP, DEFAULT_HISTOGRAM_BINS};
use liqarch_core::marketdata::{Venue, VenueKind, DEFAULT_MIN_MINUTES};
use liqarch_core::portfolio::DEFAULT_LAMBDA_FLOOR;
use liqarch_core::synth::{self, AssetParams, JumpParams, DEFAULT_UNIVERSE_SEED};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VenueName {
    Stock,
    Crypto,
}

impl VenueName {
    pub fn venue(self) -> Venue {
        Venue::from_kind(match self {
            VenueName::Stock => VenueKind::Stock,
            VenueName::Crypto => VenueKind::Crypto,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    PerWindow,
    FirstWindow,
}

impl From<Selection> for OrderSelection {
    fn from(s: Selection) -> Self {
        match s {
            Selection::PerWindow => OrderSelection::PerWindow,
            Selection::FirstWindow => OrderSelection::FirstWindow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    HighJump,
    NoJump,
}

/// The `[synth]` table as written in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthFile {
    pub preset: Option<Preset>,
    pub assets: Option<usize>,
    pub days: Option<usize>,
    pub start: Option<NaiveDate>,
    pub thin: Option<usize>,
    pub planted: Option<bool>,
    pub intensity: Option<f64>,
    pub jump_mean: Option<f64>,
    pub jump_sd: Option<f64>,
    pub base_sigma: Option<f64>,
    pub volume_mu: Option<f64>,
    pub volume_sigma: Option<f64>,
    pub volume_spike: Option<f64>,
    pub vol_alpha: Option<f64>,
    pub vol_beta: Option<f64>,
    pub drift_ar: Option<f64>,
    pub drift_mean: Option<f64>,
}

/// A config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub venue: Option<VenueName>,
    pub inputs: Option<Vec<PathBuf>>,
    pub output_dir: Option<PathBuf>,
    pub window_len: Option<usize>,
    pub p_max: Option<usize>,
    pub q_max: Option<usize>,
    pub order_selection: Option<Selection>,
    pub include_intercept: Option<bool>,
    pub min_minutes: Option<usize>,
    pub beta_cap: Option<f64>,
    pub histogram_bins: Option<usize>,
    pub annualization_days: Option<u32>,
    pub lambda_floor: Option<f64>,
    pub seed: Option<u64>,
    pub synth: Option<SynthFile>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut file: ConfigFile =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };
        if let Some(inputs) = file.inputs.as_mut() {
            *inputs = inputs.iter().map(resolve).collect();
        }
        file.output_dir = file.output_dir.as_ref().map(resolve);
        Ok(file)
    }
}

/// Command-line overrides, one per config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub venue: Option<VenueName>,
    /// Minute-bar CSV; repeat for several files.
    #[arg(long = "input", global = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub window_len: Option<usize>,
    #[arg(long, global = true)]
    pub p_max: Option<usize>,
    #[arg(long, global = true)]
    pub q_max: Option<usize>,
    #[arg(long, global = true)]
    pub order_selection: Option<Selection>,
    #[arg(long, global = true)]
    pub include_intercept: Option<bool>,
    #[arg(long, global = true)]
    pub min_minutes: Option<usize>,
    #[arg(long, global = true)]
    pub beta_cap: Option<f64>,
    #[arg(long, global = true)]
    pub histogram_bins: Option<usize>,
    #[arg(long, global = true)]
    pub annualization_days: Option<u32>,
    #[arg(long, global = true)]
    pub lambda_floor: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub synth: SynthOverrides,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SynthOverrides {
    #[arg(long, global = true)]
    pub preset: Option<Preset>,
    #[arg(long, global = true)]
    pub assets: Option<usize>,
    #[arg(long, global = true)]
    pub days: Option<usize>,
    /// First session date, YYYY-MM-DD.
    #[arg(long, global = true)]
    pub start: Option<NaiveDate>,
    /// Keep every n-th minute bar of the simulated sessions.
    #[arg(long, global = true)]
    pub thin: Option<usize>,
    /// Emit a planted daily-jump fixture instead of minute bars.
    #[arg(long, global = true)]
    pub planted: Option<bool>,
    #[arg(long, global = true)]
    pub intensity: Option<f64>,
    #[arg(long, global = true)]
    pub jump_mean: Option<f64>,
    #[arg(long, global = true)]
    pub jump_sd: Option<f64>,
    #[arg(long, global = true)]
    pub base_sigma: Option<f64>,
    #[arg(long, global = true)]
    pub volume_mu: Option<f64>,
    #[arg(long, global = true)]
    pub volume_sigma: Option<f64>,
    #[arg(long, global = true)]
    pub volume_spike: Option<f64>,
    #[arg(long, global = true)]
    pub vol_alpha: Option<f64>,
    #[arg(long, global = true)]
    pub vol_beta: Option<f64>,
    #[arg(long, global = true)]
    pub drift_ar: Option<f64>,
    #[arg(long, global = true)]
    pub drift_mean: Option<f64>,
}

impl SynthOverrides {
    fn any(&self) -> bool {
        let SynthOverrides {
            preset,
            assets,
            days,
            start,
            thin,
            planted,
            intensity,
            jump_mean,
            jump_sd,
            base_sigma,
            volume_mu,
            volume_sigma,
            volume_spike,
            vol_alpha,
            vol_beta,
            drift_ar,
            drift_mean,
        } = self;
        preset.is_some()
            || assets.is_some()
            || days.is_some()
            || start.is_some()
            || thin.is_some()
            || planted.is_some()
            || [intensity, jump_mean, jump_sd, base_sigma, volume_mu, volume_sigma, volume_spike]
                .iter()
                .any(|v| v.is_some())
            || [vol_alpha, vol_beta, drift_ar, drift_mean].iter().any(|v| v.is_some())
    }
}

/// Synthetic-universe settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub preset: Preset,
    pub assets: usize,
    pub days: usize,
    pub start: NaiveDate,
    pub thin: usize,
    pub planted: bool,
    pub intensity: f64,
    pub jump_mean: f64,
    pub jump_sd: f64,
    pub base_sigma: f64,
    pub volume_mu: f64,
    pub volume_sigma: f64,
    pub volume_spike: f64,
    pub vol_alpha: f64,
    pub vol_beta: f64,
    pub drift_ar: f64,
    pub drift_mean: f64,
}

impl SynthConfig {
    fn resolve(file: SynthFile, flags: &SynthOverrides) -> Self {
        let preset = flags.preset.or(file.preset).unwrap_or(Preset::HighJump);
        let base = match preset {
            Preset::HighJump => synth::high_jump_assets(1),
            Preset::NoJump => synth::no_jump_assets(1),
        }
        .remove(0);
        let j = base.jump;
        Self {
            preset,
            assets: flags.assets.or(file.assets).unwrap_or(4),
            days: flags.days.or(file.days).unwrap_or(900),
            start: flags
                .start
                .or(file.start)
                .unwrap_or(NaiveDate::from_ymd_opt(2021, 1, 1).expect("valid date")),
            thin: flags.thin.or(file.thin).unwrap_or(1),
            planted: flags.planted.or(file.planted).unwrap_or(false),
            intensity: flags.intensity.or(file.intensity).unwrap_or(j.intensity),
            jump_mean: flags.jump_mean.or(file.jump_mean).unwrap_or(j.jump_mean),
            jump_sd: flags.jump_sd.or(file.jump_sd).unwrap_or(j.jump_sd),
            base_sigma: flags.base_sigma.or(file.base_sigma).unwrap_or(j.base_sigma),
            volume_mu: flags.volume_mu.or(file.volume_mu).unwrap_or(j.volume_mu),
            volume_sigma: flags.volume_sigma.or(file.volume_sigma).unwrap_or(j.volume_sigma),
            volume_spike: flags.volume_spike.or(file.volume_spike).unwrap_or(j.volume_spike),
            vol_alpha: flags.vol_alpha.or(file.vol_alpha).unwrap_or(base.vol_alpha),
            vol_beta: flags.vol_beta.or(file.vol_beta).unwrap_or(base.vol_beta),
            drift_ar: flags.drift_ar.or(file.drift_ar).unwrap_or(base.drift_ar),
            drift_mean: flags.drift_mean.or(file.drift_mean).unwrap_or(base.drift_mean),
        }
    }

    pub fn jump_params(&self) -> JumpParams {
        JumpParams {
            intensity: self.intensity,
            jump_mean: self.jump_mean,
            jump_sd: self.jump_sd,
            base_sigma: self.base_sigma,
            volume_mu: self.volume_mu,
            volume_sigma: self.volume_sigma,
            volume_spike: self.volume_spike,
        }
    }

    /// Asset `i` is named `SYN{i+1}`.
    pub fn asset_params(&self) -> Vec<AssetParams> {
        (0..self.assets)
            .map(|i| AssetParams {
                vol_alpha: self.vol_alpha,
                vol_beta: self.vol_beta,
                drift_ar: self.drift_ar,
                drift_mean: self.drift_mean,
                ..AssetParams::new(format!("SYN{}", i + 1), self.jump_params())
            })
            .collect()
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub venue: VenueName,
    pub inputs: Vec<PathBuf>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub window_len: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub order_selection: Selection,
    pub include_intercept: bool,
    pub min_minutes: usize,
    pub beta_cap: f64,
    pub histogram_bins: usize,
    pub annualization_days: u32,
    pub lambda_floor: f64,
    pub seed: u64,
    /// Present when the file has a `[synth]` table or a synth flag is given.
    pub synth: Option<SynthConfig>,
}

impl RunConfig {
    /// Merges the config file named by `flags.config` (if any) with the flags.
    pub fn from_overrides(flags: &Overrides) -> Result<Self, Error> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Self::resolve(file, flags)
    }

    pub fn resolve(file: ConfigFile, flags: &Overrides) -> Result<Self, Error> {
        let venue = flags.venue.or(file.venue).unwrap_or(VenueName::Crypto);
        let v = venue.venue();
        let inputs = if flags.inputs.is_empty() {
            file.inputs.unwrap_or_default()
        } else {
            flags.inputs.clone()
        };
        let synth = match (file.synth, flags.synth.any()) {
            (Some(s), _) => Some(SynthConfig::resolve(s, &flags.synth)),
            (None, true) => Some(SynthConfig::resolve(SynthFile::default(), &flags.synth)),
            (None, false) => None,
        };
        let cfg = Self {
            venue,
            inputs,
            output_dir: flags
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("out")),
            window_len: flags.window_len.or(file.window_len).unwrap_or(v.default_window_len()),
            p_max: flags.p_max.or(file.p_max).unwrap_or(MAX_ORDER),
            q_max: flags.q_max.or(file.q_max).unwrap_or(MAX_ORDER),
            order_selection: flags.order_selection.or(file.order_selection).unwrap_or(Selection::PerWindow),
            include_intercept: flags.include_intercept.or(file.include_intercept).unwrap_or(false),
            min_minutes: flags.min_minutes.or(file.min_minutes).unwrap_or(DEFAULT_MIN_MINUTES),
            beta_cap: flags.beta_cap.or(file.beta_cap).unwrap_or(DEFAULT_BETA_CAP),
            histogram_bins: flags.histogram_bins.or(file.histogram_bins).unwrap_or(DEFAULT_HISTOGRAM_BINS),
            annualization_days: flags
                .annualization_days
                .or(file.annualization_days)
                .unwrap_or(v.annualization_days),
            lambda_floor: flags.lambda_floor.or(file.lambda_floor).unwrap_or(DEFAULT_LAMBDA_FLOOR),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_UNIVERSE_SEED),
            synth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.window_len < MIN_WINDOW_LEN {
            return bad(format!("window_len must be at least {MIN_WINDOW_LEN}, got {}", self.window_len));
        }
        if self.p_max > MAX_ORDER || self.q_max > MAX_ORDER {
            return bad(format!("p_max and q_max must be at most {MAX_ORDER}"));
        }
        if !(self.beta_cap > 0.0) || !self.beta_cap.is_finite() {
            return bad(format!("beta_cap must be positive, got {}", self.beta_cap));
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be at least 1".into());
        }
        if self.annualization_days == 0 {
            return bad("annualization_days must be at least 1".into());
        }
        if !(self.lambda_floor > 0.0) || !self.lambda_floor.is_finite() {
            return bad(format!("lambda_floor must be positive, got {}", self.lambda_floor));
        }
        if let Some(s) = &self.synth {
            if s.assets == 0 || s.days == 0 || s.thin == 0 {
                return bad("synth assets, days and thin must be at least 1".into());
            }
            s.jump_params()
                .validate()
                .map_err(|e| Error::Config(format!("synth: {e}")))?;
        }
        Ok(())
    }

    /// Every configured input must exist.
    pub fn check_inputs(&self) -> Result<(), Error> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files given (use --input or `inputs` in the config)".into()));
        }
        match self.inputs.iter().find(|p| !p.is_file()) {
            Some(p) => Err(Error::Config(format!("input file not found: {}", p.display()))),
            None => Ok(()),
        }
    }

    pub fn venue(&self) -> Venue {
        self.venue.venue()
    }

    pub fn synth_or_default(&self) -> SynthConfig {
        self.synth
            .clone()
            .unwrap_or_else(|| SynthConfig::resolve(SynthFile::default(), &SynthOverrides::default()))
    }
}
