//! System configuration: every radio/geometry constant of the urban
//! scenario plus the density-model, LoS-model, mobility, and run-control
//! knobs. Loads from a flat `key = value` text file with hard errors on
//! unknown keys, and re-emits canonically for hashing and provenance.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::channel::{LinkBudget, LosEnvParams};
use crate::error::{Error, Result};
use crate::intensity::LgcpParams;
use crate::scalar::Real;
use crate::units::db_to_linear;

/// Interferer density of the documented fast mode, nodes/m². One hundredth
/// of the default urban density; statistical checks pass in seconds instead
/// of minutes.
pub const REDUCED_DENSITY_LAMBDA: f64 = 2e-4;

/// Full parameter set of one experiment.
///
/// Defaults model a dense urban deployment at 3.5 GHz. Antenna gains are
/// kept in dBi exactly as configured; they are converted to linear scale
/// once when a [`LinkBudget`] is built, never in the sampling loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    /// Minimum horizontal distance between a receiver and any interferer, m.
    pub r0: T,
    /// Transmit power of each interferer, W.
    pub p_tx_interferer: T,
    /// Transmit power of the remote controller, W.
    pub p_tx_rc: T,
    /// Transmit power of the UAV, W.
    pub p_tx_uav: T,
    /// Interferer antenna gain, dBi.
    pub g_interferer_dbi: T,
    /// Remote-controller antenna gain, dBi.
    pub g_rc_dbi: T,
    /// UAV antenna gain, dBi.
    pub g_uav_dbi: T,
    /// Uplink LoS path-loss exponent (the closed forms require 2).
    pub eta_los_ul: T,
    /// Uplink NLoS path-loss exponent, > 2.
    pub eta_nlos_ul: T,
    /// Downlink NLoS path-loss exponent, > 2.
    pub eta_nlos_dl: T,
    /// Carrier frequency, Hz.
    pub freq_hz: T,
    /// Mean interferer density, nodes/m².
    pub lambda_bar: T,
    /// Outer radius of the simulated environment, m.
    pub r_max: T,
    /// UAV altitude, m.
    pub altitude: T,
    /// Log-variance of the density field.
    pub sigma0_sq: T,
    /// Density-correlation decay rate, 1/m.
    pub k0: T,
    /// Break-point LoS decay fit parameter.
    pub los_mu: T,
    /// Break-point distance fit parameter (break at `los_kappa · altitude`).
    pub los_kappa: T,
    /// Building height scale of the exact LoS model, m.
    pub los_gamma: T,
    /// Built-up area ratio of the exact LoS model.
    pub los_delta: T,
    /// Building density of the exact LoS model, buildings/m².
    pub los_beta: T,
    /// Random-walk grid spacing, m.
    pub walk_step: T,
    /// Maximum 2-D UAV–controller separation, m.
    pub walk_d_max: T,
    /// Monte-Carlo trials per sweep point.
    pub trials: u64,
    /// Master random seed.
    pub seed: u64,
}

impl<T: Real> Default for SystemConfig<T> {
    fn default() -> Self {
        Self {
            r0: T::of(20.0),
            p_tx_interferer: T::of(0.1),
            p_tx_rc: T::of(0.1),
            p_tx_uav: T::of(0.1),
            g_interferer_dbi: T::of(3.0),
            g_rc_dbi: T::of(6.0),
            g_uav_dbi: T::of(6.0),
            eta_los_ul: T::of(2.0),
            eta_nlos_ul: T::of(3.0),
            eta_nlos_dl: T::of(3.0),
            freq_hz: T::of(3.5e9),
            lambda_bar: T::of(0.02),
            r_max: T::of(3000.0),
            altitude: T::of(30.0),
            sigma0_sq: T::of(1.0),
            k0: T::of(0.05),
            los_mu: T::of(0.625),
            los_kappa: T::of(1.38),
            los_gamma: T::of(15.0),
            los_delta: T::of(0.3),
            los_beta: T::of(5e-4),
            walk_step: T::of(10.0),
            walk_d_max: T::of(100.0),
            trials: 10_000,
            seed: 42,
        }
    }
}

impl<T: Real> SystemConfig<T> {
    /// Parse a flat `key = value` file. `#` starts a comment; keys may
    /// appear at most once; unknown keys are hard errors so a typo cannot
    /// silently fall back to a default.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::config(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
            cfg.assign(key, value, lineno + 1)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    fn assign(&mut self, key: &str, value: &str, lineno: usize) -> Result<()> {
        let bad_num = |k: &str, v: &str| {
            Error::config(format!(
                "line {lineno}: key `{k}` has non-numeric value `{v}`"
            ))
        };
        let parse_t = |v: &str, k: &str| -> Result<T> {
            let x: f64 = v.parse().map_err(|_| bad_num(k, v))?;
            Ok(T::of(x))
        };
        let parse_u = |v: &str, k: &str| -> Result<u64> { v.parse().map_err(|_| bad_num(k, v)) };
        match key {
            "r0" => self.r0 = parse_t(value, key)?,
            "p_tx_interferer" => self.p_tx_interferer = parse_t(value, key)?,
            "p_tx_rc" => self.p_tx_rc = parse_t(value, key)?,
            "p_tx_uav" => self.p_tx_uav = parse_t(value, key)?,
            "g_interferer_dbi" => self.g_interferer_dbi = parse_t(value, key)?,
            "g_rc_dbi" => self.g_rc_dbi = parse_t(value, key)?,
            "g_uav_dbi" => self.g_uav_dbi = parse_t(value, key)?,
            "eta_los_ul" => self.eta_los_ul = parse_t(value, key)?,
            "eta_nlos_ul" => self.eta_nlos_ul = parse_t(value, key)?,
            "eta_nlos_dl" => self.eta_nlos_dl = parse_t(value, key)?,
            "freq_hz" => self.freq_hz = parse_t(value, key)?,
            "lambda_bar" => self.lambda_bar = parse_t(value, key)?,
            "r_max" => self.r_max = parse_t(value, key)?,
            "altitude" => self.altitude = parse_t(value, key)?,
            "sigma0_sq" => self.sigma0_sq = parse_t(value, key)?,
            "k0" => self.k0 = parse_t(value, key)?,
            "los_mu" => self.los_mu = parse_t(value, key)?,
            "los_kappa" => self.los_kappa = parse_t(value, key)?,
            "los_gamma" => self.los_gamma = parse_t(value, key)?,
            "los_delta" => self.los_delta = parse_t(value, key)?,
            "los_beta" => self.los_beta = parse_t(value, key)?,
            "walk_step" => self.walk_step = parse_t(value, key)?,
            "walk_d_max" => self.walk_d_max = parse_t(value, key)?,
            "trials" => self.trials = parse_u(value, key)?,
            "seed" => self.seed = parse_u(value, key)?,
            other => {
                return Err(Error::config(format!(
                    "line {lineno}: unknown key `{other}`"
                )));
            }
        }
        Ok(())
    }

    /// Canonical emission: fixed key order, shortest round-trip numbers.
    /// Parsing the emitted text reproduces the config exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(s, "{key} = {value}");
        }
        s
    }

    /// `(key, value)` pairs in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("r0", self.r0.to_string()),
            ("p_tx_interferer", self.p_tx_interferer.to_string()),
            ("p_tx_rc", self.p_tx_rc.to_string()),
            ("p_tx_uav", self.p_tx_uav.to_string()),
            ("g_interferer_dbi", self.g_interferer_dbi.to_string()),
            ("g_rc_dbi", self.g_rc_dbi.to_string()),
            ("g_uav_dbi", self.g_uav_dbi.to_string()),
            ("eta_los_ul", self.eta_los_ul.to_string()),
            ("eta_nlos_ul", self.eta_nlos_ul.to_string()),
            ("eta_nlos_dl", self.eta_nlos_dl.to_string()),
            ("freq_hz", self.freq_hz.to_string()),
            ("lambda_bar", self.lambda_bar.to_string()),
            ("r_max", self.r_max.to_string()),
            ("altitude", self.altitude.to_string()),
            ("sigma0_sq", self.sigma0_sq.to_string()),
            ("k0", self.k0.to_string()),
            ("los_mu", self.los_mu.to_string()),
            ("los_kappa", self.los_kappa.to_string()),
            ("los_gamma", self.los_gamma.to_string()),
            ("los_delta", self.los_delta.to_string()),
            ("los_beta", self.los_beta.to_string()),
            ("walk_step", self.walk_step.to_string()),
            ("walk_d_max", self.walk_d_max.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    /// SHA-256 of the canonical emission, hex-encoded.
    pub fn sha256_hex(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(msg.to_string()))
            }
        };
        check(
            self.r0 > T::one(),
            "r0 must exceed 1 m (downlink minimum distance)",
        )?;
        check(self.r_max > self.r0, "r_max must exceed r0")?;
        check(
            self.p_tx_interferer > T::zero(),
            "p_tx_interferer must be positive",
        )?;
        check(self.p_tx_rc > T::zero(), "p_tx_rc must be positive")?;
        check(self.p_tx_uav > T::zero(), "p_tx_uav must be positive")?;
        check(self.freq_hz > T::zero(), "freq_hz must be positive")?;
        check(
            self.eta_los_ul == T::of(2.0),
            "eta_los_ul must equal 2 (inverse-square LoS is assumed by the closed forms)",
        )?;
        check(
            self.eta_nlos_ul > T::of(2.0),
            "eta_nlos_ul must exceed 2 (integrability)",
        )?;
        check(
            self.eta_nlos_dl > T::of(2.0),
            "eta_nlos_dl must exceed 2 (integrability)",
        )?;
        check(self.lambda_bar > T::zero(), "lambda_bar must be positive")?;
        check(
            self.sigma0_sq >= T::zero(),
            "sigma0_sq must be non-negative",
        )?;
        check(self.k0 >= T::zero(), "k0 must be non-negative")?;
        check(self.altitude > T::zero(), "altitude must be positive")?;
        check(self.los_mu > T::zero(), "los_mu must be positive")?;
        check(self.los_kappa > T::zero(), "los_kappa must be positive")?;
        check(self.los_gamma > T::zero(), "los_gamma must be positive")?;
        check(self.los_delta > T::zero(), "los_delta must be positive")?;
        check(self.los_beta > T::zero(), "los_beta must be positive")?;
        check(self.walk_step > T::zero(), "walk_step must be positive")?;
        check(
            self.walk_d_max >= T::zero(),
            "walk_d_max must be non-negative",
        )?;
        check(self.trials >= 1, "trials must be at least 1")?;
        Ok(())
    }

    /// Density-model parameters derived from this config.
    pub fn lgcp(&self) -> Result<LgcpParams<T>> {
        LgcpParams::new(self.lambda_bar, self.sigma0_sq, self.k0)
    }

    /// LoS environment parameters derived from this config.
    pub fn los_env(&self) -> LosEnvParams<T> {
        LosEnvParams {
            gamma: self.los_gamma,
            delta: self.los_delta,
            beta: self.los_beta,
            mu: self.los_mu,
            kappa: self.los_kappa,
        }
    }

    /// Interferer-to-UAV link budget (gains converted to linear here).
    pub fn ul_budget(&self) -> LinkBudget<T> {
        LinkBudget {
            p_tx: self.p_tx_interferer,
            g_tx: db_to_linear(self.g_interferer_dbi),
            g_rx: db_to_linear(self.g_uav_dbi),
            freq: self.freq_hz,
        }
    }

    /// Interferer-to-controller link budget.
    pub fn dl_budget(&self) -> LinkBudget<T> {
        LinkBudget {
            p_tx: self.p_tx_interferer,
            g_tx: db_to_linear(self.g_interferer_dbi),
            g_rx: db_to_linear(self.g_rc_dbi),
            freq: self.freq_hz,
        }
    }

    /// Minimum 3-D distance between the UAV and any interferer.
    pub fn r0_3d(&self) -> T {
        (self.altitude * self.altitude + self.r0 * self.r0).sqrt()
    }

    pub fn with_altitude(mut self, altitude: T) -> Self {
        self.altitude = altitude;
        self
    }

    /// Same scenario at the documented reduced interferer density.
    pub fn reduced_density(mut self) -> Self {
        self.lambda_bar = T::of(REDUCED_DENSITY_LAMBDA);
        self
    }
}
