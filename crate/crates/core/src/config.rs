//! Experiment configuration: a flat key = value format, presets mirroring the
//! reference experiments, and validation of every cross-field invariant.

use serde::{Deserialize, Serialize};

use crate::forward::ContrastProfile;
use crate::pswf::default_basis_size;
use crate::{Error, Result};

/// Default noiseless floor for the prolate-eigenvalue index-set rule; tuned so
/// c=20 selects 37 modes and c=40 selects 54.
pub const DEFAULT_LAMBDA_FLOOR: f64 = 3e-17;

/// Floor for the singular-value cutoff: data-matrix eigenvalues below the
/// double-precision assembly error carry no information.
pub const MU_NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKindSpec {
    Constant,
    IncDec,
    DecInc,
    Oscillatory,
    TwoComponent,
    Piecewise,
}

/// Serializable description of a contrast profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKindSpec,
    pub r: f64,
    /// Oscillation count (oscillatory only).
    pub m: u32,
    /// Separation between the two blocks (two_component only).
    pub gap: f64,
    /// Constant pieces (a, b, value) (piecewise only).
    pub pieces: Vec<(f64, f64, f64)>,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            kind: ProfileKindSpec::Constant,
            r: 0.66,
            m: 4,
            gap: 0.1,
            pieces: Vec::new(),
        }
    }
}

impl ProfileSpec {
    pub fn build(&self) -> Result<ContrastProfile> {
        match self.kind {
            ProfileKindSpec::Constant => ContrastProfile::constant(self.r),
            ProfileKindSpec::IncDec => ContrastProfile::inc_dec(self.r),
            ProfileKindSpec::DecInc => ContrastProfile::dec_inc(self.r),
            ProfileKindSpec::Oscillatory => ContrastProfile::oscillatory(self.r, self.m),
            ProfileKindSpec::TwoComponent => ContrastProfile::two_component(self.r, self.gap),
            ProfileKindSpec::Piecewise => ContrastProfile::piecewise(self.pieces.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegKind {
    Cutoff,
    Tikhonov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegSpec {
    pub kind: RegKind,
    /// Cutoff: threshold on μ_n (floored at [`MU_NOISE_FLOOR`]).
    /// Tikhonov: the regularization parameter α.
    pub alpha: f64,
}

impl Default for RegSpec {
    fn default() -> Self {
        RegSpec { kind: RegKind::Cutoff, alpha: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Standard,
    SignChanging,
}

/// Full description of one experiment run; serializes into `summary.json` so
/// any run can be replayed from its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Bandwidth of the restricted Fourier data.
    pub c: f64,
    /// Basis size N (functions 0..=N); auto-sized from c when absent.
    pub n: Option<usize>,
    /// Legendre truncation N_t; auto 2N+30 when absent.
    pub n_t: Option<usize>,
    /// LGL quadrature size.
    pub n_q: usize,
    /// Probe half-width ε.
    pub epsilon: f64,
    /// Relative noise level δ (‖A^δ − A‖₂ = δ‖A‖₂).
    pub delta: f64,
    pub seed: u64,
    pub profile: ProfileSpec,
    pub z_start: f64,
    pub z_stop: f64,
    pub z_count: usize,
    pub reg: RegSpec,
    pub mode: RunMode,
    /// Background level (sign-changing mode).
    pub q_inf: f64,
    /// Background support radius D (sign-changing mode).
    pub d_radius: f64,
    /// Index-set rule: 𝕁 = longest prefix with |λ_n| > max(δ, lambda_floor).
    pub lambda_floor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            c: 20.0,
            n: None,
            n_t: None,
            n_q: 100,
            epsilon: 0.05,
            delta: 0.0,
            seed: 0,
            profile: ProfileSpec::default(),
            z_start: -0.9,
            z_stop: 0.9,
            z_count: 181,
            reg: RegSpec::default(),
            mode: RunMode::Standard,
            q_inf: 1.0,
            d_radius: 0.8,
            lambda_floor: DEFAULT_LAMBDA_FLOOR,
        }
    }
}

impl ExperimentConfig {
    /// Resolved basis size and truncation.
    pub fn resolved_basis(&self) -> (usize, usize) {
        let n = self.n.unwrap_or_else(|| default_basis_size(self.c));
        let n_t = self.n_t.unwrap_or(2 * n + 30);
        (n, n_t)
    }

    pub fn z_grid(&self) -> Vec<f64> {
        if self.z_count == 1 {
            return vec![self.z_start];
        }
        let step = (self.z_stop - self.z_start) / (self.z_count - 1) as f64;
        (0..self.z_count).map(|i| self.z_start + i as f64 * step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.c > 0.0) {
            return fail(format!("c must be positive, got {}", self.c));
        }
        if self.n_q < 2 {
            return fail(format!("n_q must be >= 2, got {}", self.n_q));
        }
        if !(self.epsilon > 0.0) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.delta < 0.0 {
            return fail(format!("delta must be >= 0, got {}", self.delta));
        }
        if self.z_count == 0 {
            return fail("z_count must be >= 1".into());
        }
        if self.z_start > self.z_stop {
            return fail(format!(
                "z grid start {} exceeds stop {}",
                self.z_start, self.z_stop
            ));
        }
        let (n, n_t) = self.resolved_basis();
        if n_t < 2 * n + 30 {
            return fail(format!("n_t = {n_t} violates n_t >= 2N+30 = {}", 2 * n + 30));
        }
        for z in [self.z_start, self.z_stop] {
            if z - self.epsilon <= -1.0 || z + self.epsilon >= 1.0 {
                return fail(format!(
                    "z grid endpoint {z} with epsilon {} leaves (-1, 1)",
                    self.epsilon
                ));
            }
        }
        if !(self.lambda_floor > 0.0) {
            return fail(format!(
                "lambda_floor must be positive, got {}",
                self.lambda_floor
            ));
        }
        match self.reg.kind {
            RegKind::Cutoff => {
                if self.reg.alpha < 0.0 {
                    return fail(format!("cutoff alpha must be >= 0, got {}", self.reg.alpha));
                }
            }
            RegKind::Tikhonov => {
                if !(self.reg.alpha > 0.0) {
                    return fail(format!(
                        "tikhonov alpha must be positive, got {}",
                        self.reg.alpha
                    ));
                }
            }
        }
        let profile = self
            .profile
            .build()
            .map_err(|e| Error::Config(format!("profile: {e}")))?;
        if self.mode == RunMode::SignChanging {
            if !(self.q_inf > 0.0) {
                return fail(format!("q_inf must be positive, got {}", self.q_inf));
            }
            if !(self.d_radius > 0.0 && self.d_radius < 1.0) {
                return fail(format!("d_radius must lie in (0, 1), got {}", self.d_radius));
            }
            if profile.support_radius() > self.d_radius {
                return fail(format!(
                    "contrast support radius {} exceeds background radius {}",
                    profile.support_radius(),
                    self.d_radius
                ));
            }
        }
        Ok(())
    }
}

/// Parse the flat `key = value` config format ('#' starts a comment).
pub fn parse_kv(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key = value, got {raw_line:?}",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value)
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
    }
    Ok(cfg)
}

/// Set one configuration key from its textual value.
pub fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse::<T>()
            .map_err(|e| Error::Config(format!("{key}: bad value {value:?}: {e}")))
    }
    match key {
        "c" => cfg.c = num(key, value)?,
        "n" => cfg.n = Some(num(key, value)?),
        "n_t" => cfg.n_t = Some(num(key, value)?),
        "n_q" => cfg.n_q = num(key, value)?,
        "epsilon" => cfg.epsilon = num(key, value)?,
        "delta" => cfg.delta = num(key, value)?,
        "seed" => cfg.seed = num(key, value)?,
        "profile" => {
            cfg.profile.kind = match value {
                "constant" => ProfileKindSpec::Constant,
                "incdec" => ProfileKindSpec::IncDec,
                "decinc" => ProfileKindSpec::DecInc,
                "oscillatory" => ProfileKindSpec::Oscillatory,
                "two_component" => ProfileKindSpec::TwoComponent,
                "piecewise" => ProfileKindSpec::Piecewise,
                other => {
                    return Err(Error::Config(format!("unknown profile kind {other:?}")));
                }
            }
        }
        "r" => cfg.profile.r = num(key, value)?,
        "m" => cfg.profile.m = num(key, value)?,
        "gap" => cfg.profile.gap = num(key, value)?,
        "pieces" => {
            let mut pieces = Vec::new();
            for part in value.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = part.split(':').map(str::trim).collect();
                if fields.len() != 3 {
                    return Err(Error::Config(format!(
                        "pieces: expected a:b:value, got {part:?}"
                    )));
                }
                pieces.push((
                    num("pieces", fields[0])?,
                    num("pieces", fields[1])?,
                    num("pieces", fields[2])?,
                ));
            }
            cfg.profile.pieces = pieces;
        }
        "z_start" => cfg.z_start = num(key, value)?,
        "z_stop" => cfg.z_stop = num(key, value)?,
        "z_count" => cfg.z_count = num(key, value)?,
        "reg" => {
            cfg.reg.kind = match value {
                "cutoff" => RegKind::Cutoff,
                "tikhonov" => RegKind::Tikhonov,
                other => return Err(Error::Config(format!("unknown regularization {other:?}"))),
            }
        }
        "alpha" => cfg.reg.alpha = num(key, value)?,
        "mode" => {
            cfg.mode = match value {
                "standard" => RunMode::Standard,
                "sign_changing" => RunMode::SignChanging,
                other => return Err(Error::Config(format!("unknown mode {other:?}"))),
            }
        }
        "q_inf" => cfg.q_inf = num(key, value)?,
        "d_radius" => cfg.d_radius = num(key, value)?,
        "lambda_floor" => cfg.lambda_floor = num(key, value)?,
        other => return Err(Error::Config(format!("unknown key {other:?}"))),
    }
    Ok(())
}

/// Named presets reproducing the reference experiment families.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fig2_c20", "constant q, r=0.66, c=20, noiseless, eps=0.05"),
        ("fig2_c40", "constant q, r=0.66, c=40, noiseless, eps=0.05"),
        ("fig3_noisy_c20", "constant q, r=0.66, c=20, 5% noise, eps=0.05"),
        ("fig4_c3_clean", "constant q, c=3, noiseless, eps=0.1"),
        ("fig4_c3_noisy", "constant q, c=3, 5% noise, eps=0.1"),
        ("fig4_c5_clean", "constant q, c=5, noiseless, eps=0.1"),
        ("fig4_c5_noisy", "constant q, c=5, 5% noise, eps=0.1"),
        ("fig4_c7_clean", "constant q, c=7, noiseless, eps=0.1"),
        ("fig4_c7_noisy", "constant q, c=7, 5% noise, eps=0.1"),
        ("fig4_c10_clean", "constant q, c=10, noiseless, eps=0.1"),
        ("fig4_c10_noisy", "constant q, c=10, 5% noise, eps=0.1"),
        ("fig5_sign", "sign-changing q with background shift, c=40, eps=0.05"),
        ("fig6_gap_1.16", "two components, gap 1.16, c=100, eps=0.05"),
        ("fig6_gap_0.08", "two components, gap 0.08, c=100, eps=0.05"),
        ("fig6_gap_0.06", "two components, gap 0.06, c=100, eps=0.05"),
        ("fig6_gap_0.04", "two components, gap 0.04, c=100, eps=0.05"),
        ("fig6_gap_0.02", "two components, gap 0.02, c=100, eps=0.05"),
        ("fig6_gap_0.01", "two components, gap 0.01, c=100, eps=0.05"),
    ]
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    match name {
        "fig2_c20" => {}
        "fig2_c40" => cfg.c = 40.0,
        "fig3_noisy_c20" => cfg.delta = 0.05,
        _ if name.starts_with("fig4_") => {
            let rest = name.strip_prefix("fig4_c").unwrap_or("");
            let (c_str, kind) = rest
                .split_once('_')
                .ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
            cfg.c = c_str
                .parse()
                .map_err(|_| Error::Config(format!("unknown preset {name:?}")))?;
            cfg.epsilon = 0.1;
            cfg.z_start = -0.85;
            cfg.z_stop = 0.85;
            cfg.z_count = 171;
            cfg.delta = match kind {
                "clean" => 0.0,
                "noisy" => 0.05,
                _ => return Err(Error::Config(format!("unknown preset {name:?}"))),
            };
        }
        "fig5_sign" => {
            cfg.c = 40.0;
            cfg.mode = RunMode::SignChanging;
            cfg.q_inf = 1.0;
            cfg.d_radius = 0.8;
            cfg.profile = ProfileSpec {
                kind: ProfileKindSpec::Piecewise,
                r: 0.6,
                m: 4,
                gap: 0.1,
                pieces: vec![(-0.6, -0.2, 0.5), (-0.2, 0.2, -0.3), (0.2, 0.6, 0.5)],
            };
        }
        _ if name.starts_with("fig6_gap_") => {
            let gap: f64 = name
                .strip_prefix("fig6_gap_")
                .unwrap()
                .parse()
                .map_err(|_| Error::Config(format!("unknown preset {name:?}")))?;
            cfg.c = 100.0;
            cfg.profile = ProfileSpec {
                kind: ProfileKindSpec::TwoComponent,
                r: 0.2,
                m: 4,
                gap,
                pieces: Vec::new(),
            };
        }
        _ => return Err(Error::Config(format!("unknown preset {name:?}"))),
    }
    cfg.validate()?;
    Ok(cfg)
}
