//! Campaign orchestration: the rotation protocol (simulate, rotate 90
//! degrees, simulate again, test for a rate shift), the sidereal sweep, and
//! the Bell-test campaign.
//!
//! Baseline calibration. The absolute propagation phase of an unbalanced
//! interferometer is ~1e7 rad; what an experimenter controls is the
//! operating point, set by trimming a mirror by fractions of a wavelength
//! until the coincidence rates sit where desired. With
//! `calibrate_baseline` enabled (the default), each campaign solves for the
//! trim that puts the stage-0 phase at its target operating point under the
//! active model: pi/2 for the rotation protocol and the sweep (so
//! `P(a=b) = 0.50` before rotation), 0 for the Bell campaign (so the
//! correlator is `cos` of the applied setting offsets alone).
//!
//! Reproducibility. Every campaign point draws from an RNG stream indexed
//! by the point's rank in the canonical (sorted) campaign plan, not by
//! execution order. Reordering the stage schedule therefore relabels
//! results without changing any sampled count, and worker scheduling cannot
//! affect outputs at all.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::analysis::{
    chsh, estimate_p_same, two_proportion_z, ChshResult, ChshTerm, ProportionEstimate, ShiftTest,
    DEFAULT_SIGMA_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::kinematics::{aligned_mode_angle, arm_wind_line_angle, LabSite, StageAngle};
use crate::montecarlo::{simulate_batch_detailed, DetectorModel, RngPolicy, Tally};
use crate::physics::{
    fold_line_angle, optical_path_difference, size_apparatus_for_shift, ArmGeometry, EtherWind,
    Orientation, PhaseModel, PhysicalConstants, SourceSpec,
};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// How arm-wind angles are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentMode {
    /// The idealized protocol: the short arm is exactly along the wind at
    /// stage 0 and exactly across it at stage 90. Valid only for those two
    /// stages.
    #[default]
    Aligned,
    /// Realistic geometry: angles follow from the site, the stage, the
    /// wind direction and the sidereal time.
    Projected,
}

/// Photon-pair source in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub wavelength_a_m: f64,
    pub wavelength_b_m: f64,
}

/// Laboratory placement in degrees (converted to radians internally).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub latitude_deg: f64,
    pub arm_azimuth_deg: f64,
}

impl SiteConfig {
    pub fn to_lab_site(&self) -> Result<LabSite> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return Err(Error::invalid_config("site.latitude_deg", "must lie in [-90, 90]"));
        }
        if !(0.0..360.0).contains(&self.arm_azimuth_deg) {
            return Err(Error::invalid_config("site.arm_azimuth_deg", "must lie in [0, 360)"));
        }
        LabSite::new(self.latitude_deg.to_radians(), self.arm_azimuth_deg.to_radians())
    }
}

/// Conventional default placement: mid-latitude site, short arm due north.
pub fn suggested_site() -> SiteConfig {
    SiteConfig { latitude_deg: 47.0, arm_azimuth_deg: 0.0 }
}

/// Measurement settings for the Bell campaign: two local phase offsets per
/// side, added on top of each interferometer's trim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshSettings {
    pub alice_rad: [f64; 2],
    pub bob_rad: [f64; 2],
    #[serde(default)]
    pub subtract: ChshTerm,
}

impl ChshSettings {
    /// Settings that drive the ideal correlator to the quantum maximum
    /// 2*sqrt(2) with the default subtraction pattern.
    pub fn ideal() -> Self {
        ChshSettings {
            alice_rad: [0.0, FRAC_PI_2],
            bob_rad: [-FRAC_PI_4, FRAC_PI_4],
            subtract: ChshTerm::E22,
        }
    }
}

fn default_stage_schedule() -> Vec<f64> {
    vec![0.0, 90.0]
}

fn default_sigma() -> f64 {
    DEFAULT_SIGMA_THRESHOLD
}

fn default_true() -> bool {
    true
}

/// Full description of a campaign. This struct is the configuration file
/// schema: unknown fields are rejected, and every angle-valued field name
/// carries its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub schema_version: u32,
    #[serde(default = "PhysicalConstants::codata")]
    pub constants: PhysicalConstants,
    pub source: SourceConfig,
    pub arms_a: ArmGeometry,
    pub arms_b: ArmGeometry,
    pub model: PhaseModel,
    /// Required in projected mode; ignored in aligned mode.
    #[serde(default)]
    pub site: Option<SiteConfig>,
    #[serde(default)]
    pub alignment: AlignmentMode,
    pub events_per_point: u64,
    pub rng: RngPolicy,
    #[serde(default = "default_stage_schedule")]
    pub stage_schedule_deg: Vec<f64>,
    #[serde(default)]
    pub sidereal_times_h: Vec<f64>,
    #[serde(default)]
    pub chsh: Option<ChshSettings>,
    #[serde(default = "default_sigma")]
    pub sigma_threshold: f64,
    #[serde(default = "default_true")]
    pub calibrate_baseline: bool,
    #[serde(default)]
    pub detector: DetectorModel,
}

fn refield(err: Error, from: &str, to: &str) -> Error {
    match err {
        Error::InvalidConfig { field, message } => Error::InvalidConfig {
            field: field.replacen(from, to, 1),
            message,
        },
        other => other,
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::invalid_config(
                "schema_version",
                format!("expected {CONFIG_SCHEMA_VERSION}"),
            ));
        }
        self.constants.validate()?;
        for (field, w) in [
            ("source.wavelength_a_m", self.source.wavelength_a_m),
            ("source.wavelength_b_m", self.source.wavelength_b_m),
        ] {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::invalid_config(field, "wavelength must be positive"));
            }
        }
        self.arms_a.validate().map_err(|e| refield(e, "arms.", "arms_a."))?;
        self.arms_b.validate().map_err(|e| refield(e, "arms.", "arms_b."))?;
        if let PhaseModel::PreferredFrame { wind } = &self.model {
            if !wind.speed_mps.is_finite()
                || wind.speed_mps < 0.0
                || wind.speed_mps >= self.constants.c
            {
                return Err(Error::invalid_config(
                    "model.wind.speed_mps",
                    format!("must lie in [0, c); got {} with c = {}", wind.speed_mps, self.constants.c),
                ));
            }
            let norm = wind.direction_norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::invalid_config(
                    "model.wind.direction",
                    format!("must be a unit vector; norm is {norm}"),
                ));
            }
        }
        match (&self.site, self.alignment) {
            (Some(site), _) => {
                site.to_lab_site()?;
            }
            (None, AlignmentMode::Projected) => {
                return Err(Error::invalid_config("site", "required in projected mode"));
            }
            (None, AlignmentMode::Aligned) => {}
        }
        self.rng.validate()?;
        self.detector.validate()?;
        if !self.sigma_threshold.is_finite() || self.sigma_threshold <= 0.0 {
            return Err(Error::invalid_config("sigma_threshold", "must be positive"));
        }
        if self.stage_schedule_deg.is_empty() {
            return Err(Error::invalid_config("stage_schedule_deg", "must not be empty"));
        }
        for &stage in &self.stage_schedule_deg {
            if !(0.0..360.0).contains(&stage) {
                return Err(Error::invalid_config(
                    "stage_schedule_deg",
                    format!("stage {stage} outside [0, 360)"),
                ));
            }
            if self.alignment == AlignmentMode::Aligned
                && stage.abs() > 1e-9
                && (stage - 90.0).abs() > 1e-9
            {
                return Err(Error::invalid_config(
                    "stage_schedule_deg",
                    format!("aligned mode only defines stages 0 and 90, got {stage}"),
                ));
            }
        }
        let mut sorted = self.stage_schedule_deg.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_config("stage_schedule_deg", "stages must be unique"));
        }
        for &t in &self.sidereal_times_h {
            if !t.is_finite() || !(0.0..24.0).contains(&t) {
                return Err(Error::invalid_config(
                    "sidereal_times_h",
                    format!("time {t} outside [0, 24)"),
                ));
            }
        }
        if let Some(chsh) = &self.chsh {
            for phase in chsh.alice_rad.iter().chain(chsh.bob_rad.iter()) {
                if !phase.is_finite() {
                    return Err(Error::invalid_config("chsh", "setting phases must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn source_spec(&self) -> Result<SourceSpec> {
        SourceSpec::from_wavelengths(
            self.source.wavelength_a_m,
            self.source.wavelength_b_m,
            &self.constants,
        )
        .map_err(|e| refield(e, "wavelength_", "source.wavelength_"))
    }

    pub fn lab_site(&self) -> Result<LabSite> {
        self.site
            .as_ref()
            .ok_or_else(|| Error::invalid_config("site", "required in projected mode"))?
            .to_lab_site()
    }

    fn preset_base(model: PhaseModel, master_seed: u64, events_per_point: u64) -> CampaignConfig {
        CampaignConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            constants: PhysicalConstants::rounded(),
            source: SourceConfig { wavelength_a_m: 1.5e-6, wavelength_b_m: 1.5e-6 },
            arms_a: ArmGeometry { long_m: 5.0, short_m: 1.25, trim_rad: 0.0 },
            arms_b: ArmGeometry { long_m: 5.0, short_m: 1.25, trim_rad: 0.0 },
            model,
            site: None,
            alignment: AlignmentMode::Aligned,
            events_per_point,
            rng: RngPolicy::new(master_seed),
            stage_schedule_deg: default_stage_schedule(),
            sidereal_times_h: Vec::new(),
            chsh: None,
            sigma_threshold: DEFAULT_SIGMA_THRESHOLD,
            calibrate_baseline: true,
            detector: DetectorModel::default(),
        }
    }

    /// The standard 30 km/s wind, along the equatorial x axis.
    pub fn preset_wind() -> EtherWind {
        EtherWind::new(30_000.0, [1.0, 0.0, 0.0])
    }

    /// Preferred-frame rate-shift preset: round-number constants
    /// (c = 3e8 m/s, beta = 1e-4, 1500 nm photons) and a 6.25 m
    /// apparatus (l = 5 m, s = 1.25 m), so the 90-degree rotation shifts
    /// the phase by pi/6 and `P(a=b)` from 0.50 to 0.25.
    pub fn preferred_frame_preset(master_seed: u64, events_per_point: u64) -> CampaignConfig {
        Self::preset_base(
            PhaseModel::PreferredFrame { wind: Self::preset_wind() },
            master_seed,
            events_per_point,
        )
    }

    /// The same apparatus under the relativistic model: rotation must
    /// produce no rate shift.
    pub fn relativistic_preset(master_seed: u64, events_per_point: u64) -> CampaignConfig {
        Self::preset_base(PhaseModel::Relativistic, master_seed, events_per_point)
    }

    /// Bell campaign at the ideal settings, under the relativistic model
    /// (the correlator law is the same for both at fixed orientation).
    pub fn bell_preset(master_seed: u64, events_per_point: u64) -> CampaignConfig {
        let mut cfg = Self::preset_base(PhaseModel::Relativistic, master_seed, events_per_point);
        cfg.chsh = Some(ChshSettings::ideal());
        cfg
    }
}

/// Raw propagation phase (no trim, no calibration) at one orientation.
fn raw_phase(cfg: &CampaignConfig, stage_rad: f64, t_sidereal_h: f64) -> Result<f64> {
    let source = cfg.source_spec()?;
    let consts = &cfg.constants;
    match &cfg.model {
        PhaseModel::Relativistic => {
            // orientation is irrelevant in this model
            let orientation = Orientation::ShortParallel;
            let tau_a = optical_path_difference(&cfg.arms_a, &cfg.model, orientation, consts)?;
            let tau_b = optical_path_difference(&cfg.arms_b, &cfg.model, orientation, consts)?;
            Ok(source.omega_a * tau_a + source.omega_b * tau_b)
        }
        PhaseModel::PreferredFrame { wind } => {
            let (theta_short, theta_long) = match cfg.alignment {
                AlignmentMode::Aligned => {
                    let short = aligned_mode_angle(StageAngle::wrapped(stage_rad))?;
                    (short, FRAC_PI_2 - short)
                }
                AlignmentMode::Projected => {
                    let site = cfg.lab_site()?;
                    let psi = arm_wind_line_angle(
                        &site,
                        StageAngle::wrapped(stage_rad),
                        wind.direction,
                        t_sidereal_h,
                    )?;
                    (fold_line_angle(psi), fold_line_angle(psi + FRAC_PI_2))
                }
            };
            let orientation = Orientation::Angled { short_rad: theta_short, long_rad: theta_long };
            let tau_a = optical_path_difference(&cfg.arms_a, &cfg.model, orientation, consts)?;
            let tau_b = optical_path_difference(&cfg.arms_b, &cfg.model, orientation, consts)?;
            Ok(source.omega_a * tau_a + source.omega_b * tau_b)
        }
    }
}

/// Additive phase offset implementing the configured trims plus, when
/// enabled, the calibration that puts the stage-0 phase at `target_rad`.
fn baseline_offset(cfg: &CampaignConfig, t_sidereal_h: f64, target_rad: f64) -> Result<f64> {
    let trims = cfg.arms_a.trim_rad + cfg.arms_b.trim_rad;
    if !cfg.calibrate_baseline {
        return Ok(trims);
    }
    let base = raw_phase(cfg, 0.0, t_sidereal_h)? + trims;
    Ok(trims + (target_rad - base).rem_euclid(TAU))
}

fn phase_at(cfg: &CampaignConfig, stage_rad: f64, t_sidereal_h: f64, offset: f64) -> Result<f64> {
    Ok(raw_phase(cfg, stage_rad, t_sidereal_h)? + offset)
}

/// Sidereal time at which the stage-0 arm is best aligned with the wind:
/// by definition 0 in aligned mode (the mode exists to represent that
/// moment), found by scanning the configured sweep grid in projected mode.
pub fn best_aligned_time(cfg: &CampaignConfig) -> Result<f64> {
    match (&cfg.alignment, &cfg.model) {
        (AlignmentMode::Aligned, _) | (_, PhaseModel::Relativistic) => Ok(0.0),
        (AlignmentMode::Projected, PhaseModel::PreferredFrame { wind }) => {
            if cfg.sidereal_times_h.is_empty() {
                return Err(Error::invalid_config(
                    "sidereal_times_h",
                    "projected mode needs sample times to scan for alignment",
                ));
            }
            let site = cfg.lab_site()?;
            let mut best: Option<(f64, f64)> = None;
            for &t in &cfg.sidereal_times_h {
                let angle = match arm_wind_line_angle(&site, StageAngle(0.0), wind.direction, t) {
                    Ok(psi) => fold_line_angle(psi),
                    Err(Error::DegenerateWindProjection) => continue,
                    Err(e) => return Err(e),
                };
                if best.is_none_or(|(_, a)| angle < a) {
                    best = Some((t, angle));
                }
            }
            best.map(|(t, _)| t).ok_or(Error::DegenerateWindProjection)
        }
    }
}

/// Ranks of each point in the canonical (sorted) campaign plan; used as RNG
/// stream indices so results do not depend on schedule order.
fn canonical_ranks<K: PartialOrd + Copy>(keys: &[K]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&i, &j| keys[i].partial_cmp(&keys[j]).expect("finite keys"));
    let mut rank = vec![0u64; keys.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u64;
    }
    rank
}

/// Simulate a single campaign point: resolve the baseline operating point
/// from the config (trims plus calibration to pi/2 at stage 0), add the
/// model-dependent orientation phase for this stage and sidereal time, and
/// sample `events_per_point` pairs on the given stream.
pub fn simulate_campaign_point(
    cfg: &CampaignConfig,
    stage_rad: f64,
    t_sidereal_h: f64,
    stream: u64,
) -> Result<Tally> {
    cfg.validate()?;
    let offset = baseline_offset(cfg, t_sidereal_h, FRAC_PI_2)?;
    let phi = phase_at(cfg, stage_rad, t_sidereal_h, offset)?;
    Ok(simulate_batch_detailed(cfg.events_per_point, phi, &cfg.rng, stream, &cfg.detector))
}

/// One simulated campaign point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StagePointReport {
    pub stage_deg: f64,
    pub t_sidereal_h: f64,
    pub tally: Tally,
    pub estimate: ProportionEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelDecision {
    PreferredFrameDetected,
    NoShiftDetected,
}

/// Required apparatus sizes for the pi/6 operating target under different
/// parameter conventions. The round-number convention (1500 nm photons,
/// beta = 1e-4) is the one that makes the textbook 6.25 m figure exact;
/// with CODATA c, a 30 km/s wind and 1550 nm photons the same target needs
/// a visibly different length, and this report keeps both in view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizingScenario {
    pub wavelength_m: f64,
    pub wind_speed_mps: f64,
    pub c_mps: f64,
    pub length_sum_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizingAssessment {
    pub target_shift_rad: f64,
    pub configured_length_sum_a_m: f64,
    pub configured_length_sum_b_m: f64,
    /// Size required for the target under the config's own source, wind
    /// and constants; absent for the relativistic model or zero wind.
    pub required_length_for_config_m: Option<f64>,
    pub round_number_convention: SizingScenario,
    pub codata_convention: SizingScenario,
    pub conventions_relative_difference: f64,
}

impl SizingAssessment {
    pub const TARGET_SHIFT_RAD: f64 = PI / 6.0;

    pub fn for_config(cfg: &CampaignConfig) -> Result<SizingAssessment> {
        let scenario = |lambda: f64, v: f64, c: f64| -> Result<SizingScenario> {
            let consts = PhysicalConstants { c };
            let source = SourceSpec::from_wavelengths(lambda, lambda, &consts)?;
            let wind = EtherWind::new(v, [1.0, 0.0, 0.0]);
            Ok(SizingScenario {
                wavelength_m: lambda,
                wind_speed_mps: v,
                c_mps: c,
                length_sum_m: size_apparatus_for_shift(Self::TARGET_SHIFT_RAD, &source, &wind, &consts)?,
            })
        };
        let round_number = scenario(1.5e-6, 30_000.0, 3.0e8)?;
        let codata = scenario(1.55e-6, 30_000.0, PhysicalConstants::codata().c)?;
        let required = match &cfg.model {
            PhaseModel::PreferredFrame { wind } if wind.speed_mps > 0.0 => Some(
                size_apparatus_for_shift(
                    Self::TARGET_SHIFT_RAD,
                    &cfg.source_spec()?,
                    wind,
                    &cfg.constants,
                )?,
            ),
            _ => None,
        };
        Ok(SizingAssessment {
            target_shift_rad: Self::TARGET_SHIFT_RAD,
            configured_length_sum_a_m: cfg.arms_a.length_sum(),
            configured_length_sum_b_m: cfg.arms_b.length_sum(),
            required_length_for_config_m: required,
            round_number_convention: round_number,
            codata_convention: codata,
            conventions_relative_difference: (codata.length_sum_m - round_number.length_sum_m)
                / round_number.length_sum_m,
        })
    }
}

/// Result of the rotation campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub model: String,
    pub decision: ModelDecision,
    pub shift: ShiftTest,
    /// `arccos(2 p_after - 1) - arccos(2 p_before - 1)` on the principal
    /// branch, with its propagated standard error (which reduces to
    /// `sqrt(1/n_before + 1/n_after)`).
    pub effective_phase_shift_rad: f64,
    pub effective_phase_shift_se_rad: f64,
    pub points: Vec<StagePointReport>,
    pub sizing: SizingAssessment,
}

/// Simulate the rotation protocol and decide between the models.
///
/// The "before" label goes to whichever of stages 0 and 90 appears first in
/// the schedule, so relabeling the schedule negates the test statistic
/// without resampling anything.
pub fn run_rotation_campaign(cfg: &CampaignConfig) -> Result<VerdictReport> {
    cfg.validate()?;
    let schedule = &cfg.stage_schedule_deg;
    let find = |target: f64| schedule.iter().position(|s| (s - target).abs() < 1e-9);
    let (i0, i90) = match (find(0.0), find(90.0)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::invalid_config(
                "stage_schedule_deg",
                "rotation protocol requires stages 0 and 90",
            ))
        }
    };
    let t_best = best_aligned_time(cfg)?;
    let offset = baseline_offset(cfg, t_best, FRAC_PI_2)?;
    let streams = canonical_ranks(schedule);
    let points = schedule
        .iter()
        .zip(&streams)
        .map(|(&stage_deg, &stream)| {
            let phi = phase_at(cfg, stage_deg.to_radians(), t_best, offset)?;
            let tally =
                simulate_batch_detailed(cfg.events_per_point, phi, &cfg.rng, stream, &cfg.detector);
            Ok(StagePointReport {
                stage_deg,
                t_sidereal_h: t_best,
                tally,
                estimate: estimate_p_same(&tally)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (before, after) = if i0 < i90 {
        (&points[i0], &points[i90])
    } else {
        (&points[i90], &points[i0])
    };
    let shift = two_proportion_z(&before.tally, &after.tally, cfg.sigma_threshold)?;
    let decision = if shift.significant {
        ModelDecision::PreferredFrameDetected
    } else {
        ModelDecision::NoShiftDetected
    };
    let dphi = (2.0 * shift.p_after.p_hat - 1.0).acos() - (2.0 * shift.p_before.p_hat - 1.0).acos();
    let dphi_se =
        (1.0 / shift.p_before.n as f64 + 1.0 / shift.p_after.n as f64).sqrt();
    Ok(VerdictReport {
        model: cfg.model.label().to_string(),
        decision,
        shift,
        effective_phase_shift_rad: dphi,
        effective_phase_shift_se_rad: dphi_se,
        points,
        sizing: SizingAssessment::for_config(cfg)?,
    })
}

/// One sweep sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t_sidereal_h: f64,
    pub stage_deg: f64,
    pub tally: Tally,
    pub estimate: ProportionEstimate,
}

/// Sample every (sidereal time, stage) pair of the configured grid.
///
/// Each sidereal sample is treated as its own measurement session: with
/// calibration enabled, the operating point is re-trimmed to pi/2 at stage
/// 0 before every session. The absolute phase drifts by radians as the
/// Earth turns, so without the per-session trim the rate pattern would be
/// dominated by that drift rather than by the alignment-modulated shift
/// the sweep is after.
pub fn run_sidereal_sweep(cfg: &CampaignConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    if cfg.alignment != AlignmentMode::Projected {
        return Err(Error::invalid_config(
            "alignment",
            "the sidereal sweep requires projected mode",
        ));
    }
    if cfg.sidereal_times_h.is_empty() {
        return Err(Error::invalid_config("sidereal_times_h", "must not be empty"));
    }
    let mut keys = Vec::new();
    for &t in &cfg.sidereal_times_h {
        for &stage in &cfg.stage_schedule_deg {
            keys.push((t, stage));
        }
    }
    let streams = canonical_ranks(&keys);
    let mut offsets = std::collections::HashMap::new();
    for &t in &cfg.sidereal_times_h {
        offsets.insert(t.to_bits(), baseline_offset(cfg, t, FRAC_PI_2)?);
    }
    keys.iter()
        .zip(&streams)
        .map(|(&(t, stage_deg), &stream)| {
            let phi = phase_at(cfg, stage_deg.to_radians(), t, offsets[&t.to_bits()])?;
            let tally =
                simulate_batch_detailed(cfg.events_per_point, phi, &cfg.rng, stream, &cfg.detector);
            Ok(SweepPoint {
                t_sidereal_h: t,
                stage_deg,
                tally,
                estimate: estimate_p_same(&tally)?,
            })
        })
        .collect()
}

/// Simulate the four CHSH setting pairs with equal event budgets.
pub fn run_bell_campaign(cfg: &CampaignConfig) -> Result<ChshResult> {
    cfg.validate()?;
    let settings = cfg
        .chsh
        .ok_or_else(|| Error::invalid_config("chsh", "bell campaign requires chsh settings"))?;
    let t_best = best_aligned_time(cfg)?;
    let offset = baseline_offset(cfg, t_best, 0.0)?;
    let base = phase_at(cfg, 0.0, t_best, offset)?;
    let mut tallies = [Tally::default(); 4];
    for (idx, tally) in tallies.iter_mut().enumerate() {
        let alice = settings.alice_rad[idx / 2];
        let bob = settings.bob_rad[idx % 2];
        *tally = simulate_batch_detailed(
            cfg.events_per_point,
            base + alice + bob,
            &cfg.rng,
            idx as u64,
            &cfg.detector,
        );
    }
    chsh(&tallies, settings.subtract)
}
