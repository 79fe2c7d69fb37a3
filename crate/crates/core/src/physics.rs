//! Closed-form physics of the two-interferometer experiment: round-trip
//! times under an ether wind, optical path differences, rotation-induced
//! phase shifts, and joint detection probabilities.
//!
//! Two phase models coexist. The relativistic model assumes the same light
//! speed in every arm, so an interferometer's path difference is
//! `(l - s) / c` regardless of orientation. The preferred-frame model gives
//! each arm the classical ether round-trip time, which depends on the angle
//! between the arm and the wind; rotating the apparatus then shifts the
//! phase and with it the coincidence rates.
//!
//! All public operations use exact (non-Taylor) expressions. The leading
//! order expansions appear only in the `*_approx` functions, which exist so
//! tests can cross-check the exact forms against them.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// CODATA exact value, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s.
    pub c: f64,
}

impl PhysicalConstants {
    pub fn codata() -> Self {
        PhysicalConstants { c: SPEED_OF_LIGHT }
    }

    /// Round-number convenience (`c = 3e8 m/s`) for setups quoted with
    /// `v/c = 1e-4` and similar textbook figures.
    pub fn rounded() -> Self {
        PhysicalConstants { c: 3.0e8 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c <= 0.0 {
            return Err(Error::invalid_config("constants.c", "must be finite and positive"));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Photon-pair source described by the two angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    /// Angular frequency of photon A, rad/s.
    pub omega_a: f64,
    /// Angular frequency of photon B, rad/s.
    pub omega_b: f64,
}

impl SourceSpec {
    pub fn new(omega_a: f64, omega_b: f64) -> Result<Self> {
        for (field, w) in [("omega_a", omega_a), ("omega_b", omega_b)] {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::invalid_config(field, "angular frequency must be positive"));
            }
        }
        Ok(SourceSpec { omega_a, omega_b })
    }

    pub fn from_wavelengths(lambda_a_m: f64, lambda_b_m: f64, consts: &PhysicalConstants) -> Result<Self> {
        for (field, l) in [("wavelength_a_m", lambda_a_m), ("wavelength_b_m", lambda_b_m)] {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::invalid_config(field, "wavelength must be positive"));
            }
        }
        SourceSpec::new(TAU * consts.c / lambda_a_m, TAU * consts.c / lambda_b_m)
    }

    pub fn wavelength_a(&self, consts: &PhysicalConstants) -> f64 {
        TAU * consts.c / self.omega_a
    }

    pub fn wavelength_b(&self, consts: &PhysicalConstants) -> f64 {
        TAU * consts.c / self.omega_b
    }

    pub fn frequency_a(&self) -> f64 {
        self.omega_a / TAU
    }

    pub fn frequency_b(&self) -> f64 {
        self.omega_b / TAU
    }
}

/// One interferometer: a long arm `l`, a short arm `s`, and a fine-trim
/// phase offset modelling sub-wavelength mirror positioning. The trim is
/// added verbatim to the computed propagation phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmGeometry {
    pub long_m: f64,
    pub short_m: f64,
    #[serde(default)]
    pub trim_rad: f64,
}

impl ArmGeometry {
    pub fn new(long_m: f64, short_m: f64, trim_rad: f64) -> Result<Self> {
        let arms = ArmGeometry { long_m, short_m, trim_rad };
        arms.validate()?;
        Ok(arms)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.long_m.is_finite() || !self.short_m.is_finite() || self.short_m <= 0.0 {
            return Err(Error::invalid_config("arms.short_m", "arm lengths must be positive"));
        }
        if self.long_m <= self.short_m {
            return Err(Error::invalid_config("arms.long_m", "long arm must exceed short arm"));
        }
        if !(0.0..TAU).contains(&self.trim_rad) {
            return Err(Error::invalid_config("arms.trim_rad", "trim must lie in [0, 2*pi)"));
        }
        Ok(())
    }

    /// `l + s`, the quantity the rotation shift scales with.
    pub fn length_sum(&self) -> f64 {
        self.long_m + self.short_m
    }
}

/// The preferred-frame hypothesis: lab speed `v` relative to that frame and
/// the wind direction as a unit vector in the equatorial frame (see the
/// kinematics module for the frame convention). `speed = 0` reduces every
/// preferred-frame expression to its relativistic counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtherWind {
    pub speed_mps: f64,
    pub direction: [f64; 3],
}

impl EtherWind {
    pub fn new(speed_mps: f64, direction: [f64; 3]) -> Self {
        EtherWind { speed_mps, direction }
    }

    /// `v/c`, after checking `0 <= v < c`.
    pub fn beta(&self, consts: &PhysicalConstants) -> Result<f64> {
        if !self.speed_mps.is_finite() || self.speed_mps < 0.0 || self.speed_mps >= consts.c {
            return Err(Error::SuperluminalWind {
                speed_mps: self.speed_mps,
                c_mps: consts.c,
            });
        }
        Ok(self.speed_mps / consts.c)
    }

    pub fn direction_norm(&self) -> f64 {
        self.direction.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Which phase law governs outcome sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseModel {
    /// Same light speed in every arm; orientation-independent phases.
    Relativistic,
    /// Classical ether kinematics with the given wind.
    PreferredFrame { wind: EtherWind },
}

impl PhaseModel {
    pub fn label(&self) -> &'static str {
        match self {
            PhaseModel::Relativistic => "relativistic",
            PhaseModel::PreferredFrame { .. } => "preferred_frame",
        }
    }
}

/// Joint outcome probabilities for one value of the total phase.
/// `p_diff` is defined as the complement of `p_same`, so the pair always
/// sums to one exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointProbabilities {
    p_same: f64,
    p_diff: f64,
}

impl JointProbabilities {
    pub fn p_same(&self) -> f64 {
        self.p_same
    }

    pub fn p_diff(&self) -> f64 {
        self.p_diff
    }
}

/// `P(a=b) = (1 + cos phi) / 2`, `P(a!=b) = 1 - P(a=b)`. 2*pi-periodic.
pub fn joint_probabilities(phi: f64) -> JointProbabilities {
    let p_same = 0.5 * (1.0 + phi.cos());
    JointProbabilities { p_same, p_diff: 1.0 - p_same }
}

/// Correlator `E = P(a=b) - P(a!=b) = cos phi`.
pub fn correlation(phi: f64) -> f64 {
    phi.cos()
}

/// Exact round-trip time along an arm parallel to the wind:
/// `2 L c / (c^2 - v^2)`, computed as `(2L/c) / (1 - beta^2)`.
pub fn roundtrip_time_parallel(length_m: f64, wind: &EtherWind, consts: &PhysicalConstants) -> Result<f64> {
    check_length(length_m)?;
    let beta = wind.beta(consts)?;
    Ok((2.0 * length_m / consts.c) / (1.0 - beta * beta))
}

/// Exact round-trip time along an arm perpendicular to the wind:
/// `2 L / sqrt(c^2 - v^2)`, computed as `(2L/c) / sqrt(1 - beta^2)`.
pub fn roundtrip_time_perpendicular(length_m: f64, wind: &EtherWind, consts: &PhysicalConstants) -> Result<f64> {
    check_length(length_m)?;
    let beta = wind.beta(consts)?;
    Ok((2.0 * length_m / consts.c) / (1.0 - beta * beta).sqrt())
}

/// Classical ether round-trip time for an arm at angle `theta` to the wind:
/// `(2L/c) * sqrt(1 - beta^2 sin^2 theta) / (1 - beta^2)`.
///
/// `theta = 0` reproduces [`roundtrip_time_parallel`] and `theta = pi/2`
/// reproduces [`roundtrip_time_perpendicular`]; the angle enters through
/// `sin^2`, so only its value modulo pi matters.
pub fn roundtrip_time_at_angle(
    length_m: f64,
    theta_rad: f64,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    check_length(length_m)?;
    let beta = wind.beta(consts)?;
    let b2 = beta * beta;
    let sin = theta_rad.sin();
    Ok((2.0 * length_m / consts.c) * (1.0 - b2 * sin * sin).sqrt() / (1.0 - b2))
}

/// Which arm lies along the wind, or explicit arm-wind angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orientation {
    /// Short arm parallel to the wind, long arm perpendicular.
    ShortParallel,
    /// Long arm parallel to the wind, short arm perpendicular.
    LongParallel,
    /// Arbitrary arm-wind angles, radians.
    Angled { short_rad: f64, long_rad: f64 },
}

/// Optical path difference (a time) of one interferometer.
///
/// Relativistic model: `(l - s) / c` for every orientation.
///
/// Preferred-frame model: each named orientation keeps the sign convention
/// of its defining expression to stay comparable with the usual write-up:
/// `ShortParallel` returns the parallel-arm time minus the
/// perpendicular-arm time (`t_par(s) - t_perp(l)`, negative for `l > s`),
/// and `LongParallel` likewise (`t_par(l) - t_perp(s)`, positive). Their
/// sum is the rotation path difference, where the opposed conventions are
/// exactly what makes the two contributions add.
///
/// `Angled` always returns long-arm time minus short-arm time, the
/// physical convention consumed by phase computations.
pub fn optical_path_difference(
    arms: &ArmGeometry,
    model: &PhaseModel,
    orientation: Orientation,
    consts: &PhysicalConstants,
) -> Result<f64> {
    match model {
        PhaseModel::Relativistic => Ok((arms.long_m - arms.short_m) / consts.c),
        PhaseModel::PreferredFrame { wind } => match orientation {
            Orientation::ShortParallel => Ok(roundtrip_time_parallel(arms.short_m, wind, consts)?
                - roundtrip_time_perpendicular(arms.long_m, wind, consts)?),
            Orientation::LongParallel => Ok(roundtrip_time_parallel(arms.long_m, wind, consts)?
                - roundtrip_time_perpendicular(arms.short_m, wind, consts)?),
            Orientation::Angled { short_rad, long_rad } => {
                Ok(roundtrip_time_at_angle(arms.long_m, long_rad, wind, consts)?
                    - roundtrip_time_at_angle(arms.short_m, short_rad, wind, consts)?)
            }
        },
    }
}

/// Exact total path difference accumulated by a 90-degree rotation:
/// the sum of the `ShortParallel` and `LongParallel` differences.
///
/// Algebraically the sum collapses to
/// `(2(l+s)/c) * beta^2 / ((1 + sqrt(1-beta^2)) * (1-beta^2))`,
/// which is the form evaluated here: the naive four-term sum cancels to
/// ~1e-8 of its operands and would drown small-beta values in round-off.
pub fn rotation_path_difference_total(
    arms: &ArmGeometry,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    arms.validate()?;
    let beta = wind.beta(consts)?;
    let b2 = beta * beta;
    let root = (1.0 - b2).sqrt();
    Ok((2.0 * arms.length_sum() / consts.c) * b2 / ((1.0 + root) * (1.0 - b2)))
}

/// Leading-order rotation path difference `(l+s) v^2 / c^3`.
pub fn rotation_path_difference_approx(
    arms: &ArmGeometry,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    arms.validate()?;
    let beta = wind.beta(consts)?;
    Ok((arms.length_sum() / consts.c) * beta * beta)
}

/// Exact total phase shift produced by the 90-degree rotation:
/// `omega_a * tau_a + omega_b * tau_b` with each interferometer's exact
/// rotation path difference. No equal-frequency assumption is made.
pub fn rotation_phase_shift(
    arms_a: &ArmGeometry,
    arms_b: &ArmGeometry,
    source: &SourceSpec,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    Ok(source.omega_a * rotation_path_difference_total(arms_a, wind, consts)?
        + source.omega_b * rotation_path_difference_total(arms_b, wind, consts)?)
}

/// Leading-order phase shift. For equal frequencies and equal geometries
/// this is the familiar `4 pi (l+s) / lambda * beta^2`.
pub fn rotation_phase_shift_approx(
    arms_a: &ArmGeometry,
    arms_b: &ArmGeometry,
    source: &SourceSpec,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    Ok(source.omega_a * rotation_path_difference_approx(arms_a, wind, consts)?
        + source.omega_b * rotation_path_difference_approx(arms_b, wind, consts)?)
}

/// Invert the leading-order shift for the apparatus size: the `l + s`
/// (shared by both interferometers) for which the 90-degree rotation
/// produces `target_shift_rad`. Equivalent to
/// `target * lambda * c^2 / (4 pi v^2)` when both photons share `lambda`.
pub fn size_apparatus_for_shift(
    target_shift_rad: f64,
    source: &SourceSpec,
    wind: &EtherWind,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if !target_shift_rad.is_finite() || target_shift_rad <= 0.0 {
        return Err(Error::NonPositiveShift { value: target_shift_rad });
    }
    let beta = wind.beta(consts)?;
    if beta == 0.0 {
        return Err(Error::ZeroWindSpeed);
    }
    Ok(target_shift_rad * consts.c / ((source.omega_a + source.omega_b) * beta * beta))
}

fn check_length(length_m: f64) -> Result<()> {
    if !length_m.is_finite() || length_m <= 0.0 {
        return Err(Error::NonPositiveLength { value: length_m });
    }
    Ok(())
}

/// Angles fold onto [0, pi/2]: a two-way light path depends on the arm
/// axis, not its sign.
pub fn fold_line_angle(angle_rad: f64) -> f64 {
    let a = angle_rad.rem_euclid(PI);
    if a > FRAC_PI_2 {
        PI - a
    } else {
        a
    }
}
