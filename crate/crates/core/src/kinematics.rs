//! Orientation of the interferometer arms relative to the ether wind as the
//! Earth rotates.
//!
//! Frame conventions. The wind direction is a unit vector in an
//! equatorial frame: `z` along the Earth's rotation axis, `x` and `y` in
//! the equatorial plane, with the frame fixed against the stars. A lab at
//! latitude `phi` has, at sidereal time `t` (hours), the rotation angle
//! `theta = 2 pi t / 24`, and local unit vectors in that frame:
//!
//! ```text
//! up    = ( cos phi cos theta,  cos phi sin theta, sin phi)
//! east  = (-sin theta,          cos theta,         0      )
//! north = (-sin phi cos theta, -sin phi sin theta, cos phi)
//! ```
//!
//! Arm azimuths are measured from north toward east. The rotation stage
//! adds its angle to the short arm's azimuth; the long arm sits 90 degrees
//! further. Returned arm-wind angles are between lines, not vectors, and
//! therefore fold onto [0, pi/2]: a two-way light path cannot tell an arm
//! from its reverse.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::physics::fold_line_angle;

pub const SIDEREAL_HOURS: f64 = 24.0;

/// Laboratory placement: geographic latitude and the azimuth of the short
/// arm when the rotation stage reads zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabSite {
    pub latitude_rad: f64,
    pub arm_azimuth_rad: f64,
}

impl LabSite {
    pub fn new(latitude_rad: f64, arm_azimuth_rad: f64) -> Result<Self> {
        let site = LabSite { latitude_rad, arm_azimuth_rad };
        site.validate()?;
        Ok(site)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&self.latitude_rad) {
            return Err(Error::invalid_config("site.latitude", "must lie in [-pi/2, pi/2]"));
        }
        if !(0.0..TAU).contains(&self.arm_azimuth_rad) {
            return Err(Error::invalid_config("site.arm_azimuth", "must lie in [0, 2*pi)"));
        }
        Ok(())
    }
}

/// Rotation-stage setting in radians; the protocol uses 0 and pi/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageAngle(pub f64);

impl StageAngle {
    pub fn new(angle_rad: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&angle_rad) {
            return Err(Error::invalid_config("stage", "must lie in [0, 2*pi)"));
        }
        Ok(StageAngle(angle_rad))
    }

    /// Wrap any real angle into [0, 2*pi).
    pub fn wrapped(angle_rad: f64) -> Self {
        StageAngle(angle_rad.rem_euclid(TAU))
    }
}

fn earth_rotation_angle(t_sidereal_h: f64) -> f64 {
    TAU * (t_sidereal_h / SIDEREAL_HOURS).rem_euclid(1.0)
}

fn local_basis(site: &LabSite, t_sidereal_h: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let theta = earth_rotation_angle(t_sidereal_h);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = site.latitude_rad.sin_cos();
    let east = [-st, ct, 0.0];
    let north = [-sp * ct, -sp * st, cp];
    let up = [cp * ct, cp * st, sp];
    (east, north, up)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(direction: [f64; 3]) -> Result<()> {
    let norm = dot(direction, direction).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}

/// Direction of the short arm in the equatorial frame, for building wind
/// vectors that are aligned with the apparatus at a chosen time.
pub fn arm_axis_equatorial(site: &LabSite, stage: StageAngle, t_sidereal_h: f64) -> [f64; 3] {
    let (east, north, _) = local_basis(site, t_sidereal_h);
    let az = site.arm_azimuth_rad + stage.0;
    let (sa, ca) = az.sin_cos();
    [
        ca * north[0] + sa * east[0],
        ca * north[1] + sa * east[1],
        ca * north[2] + sa * east[2],
    ]
}

/// Azimuth (from north toward east) of the wind's projection into the lab
/// horizontal plane. Degenerate when the wind is within ~1e-12 of vertical.
pub fn wind_horizontal_azimuth(site: &LabSite, wind_dir: [f64; 3], t_sidereal_h: f64) -> Result<f64> {
    check_unit(wind_dir)?;
    let (east, north, up) = local_basis(site, t_sidereal_h);
    let vertical = dot(wind_dir, up);
    let horizontal_norm_sq = (1.0 - vertical * vertical).max(0.0);
    if horizontal_norm_sq < 1e-24 {
        return Err(Error::DegenerateWindProjection);
    }
    Ok(dot(wind_dir, east).atan2(dot(wind_dir, north)))
}

/// Oriented angle between the short-arm line and the projected wind line,
/// reduced modulo pi. Adding delta to the stage shifts this value by
/// exactly delta (mod pi), so it carries rotation covariance that the
/// folded angle hides.
pub fn arm_wind_line_angle(
    site: &LabSite,
    stage: StageAngle,
    wind_dir: [f64; 3],
    t_sidereal_h: f64,
) -> Result<f64> {
    let wind_az = wind_horizontal_azimuth(site, wind_dir, t_sidereal_h)?;
    Ok((site.arm_azimuth_rad + stage.0 - wind_az).rem_euclid(PI))
}

/// Angle in [0, pi/2] between the short-arm axis and the wind direction
/// projected into the lab horizontal plane.
pub fn arm_wind_angle(
    site: &LabSite,
    stage: StageAngle,
    wind_dir: [f64; 3],
    t_sidereal_h: f64,
) -> Result<f64> {
    Ok(fold_line_angle(arm_wind_line_angle(site, stage, wind_dir, t_sidereal_h)?))
}

/// The idealized protocol geometry: the short arm is taken to lie exactly
/// along the wind at stage 0 and exactly across it at stage pi/2,
/// bypassing all sidereal geometry. Any other stage is an error in this
/// mode because the idealization says nothing about intermediate settings.
pub fn aligned_mode_angle(stage: StageAngle) -> Result<f64> {
    const EPS: f64 = 1e-9;
    if stage.0.abs() < EPS {
        Ok(0.0)
    } else if (stage.0 - FRAC_PI_2).abs() < EPS {
        Ok(FRAC_PI_2)
    } else {
        Err(Error::StageOutsideAlignedMode { angle_rad: stage.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn site47() -> LabSite {
        LabSite::new(47.0f64.to_radians(), 0.0).unwrap()
    }

    /// Independent oracle: build every vector explicitly, rotate the t=0
    /// basis with a rotation matrix about the Earth's axis, project the
    /// wind, and measure the folded angle through clamped dot products.
    fn brute_force_angle(site: &LabSite, stage: f64, wind: [f64; 3], t_h: f64) -> Option<f64> {
        let theta = TAU * (t_h / 24.0).rem_euclid(1.0);
        let rot = |v: [f64; 3]| -> [f64; 3] {
            [
                theta.cos() * v[0] - theta.sin() * v[1],
                theta.sin() * v[0] + theta.cos() * v[1],
                v[2],
            ]
        };
        let (sp, cp) = (site.latitude_rad.sin(), site.latitude_rad.cos());
        let east0 = [0.0, 1.0, 0.0];
        let north0 = [-sp, 0.0, cp];
        let up0 = [cp, 0.0, sp];
        let (east, north, up) = (rot(east0), rot(north0), rot(up0));
        let az = site.arm_azimuth_rad + stage;
        let arm = [
            az.cos() * north[0] + az.sin() * east[0],
            az.cos() * north[1] + az.sin() * east[1],
            az.cos() * north[2] + az.sin() * east[2],
        ];
        let wu = dot(wind, up);
        let wh = [wind[0] - wu * up[0], wind[1] - wu * up[1], wind[2] - wu * up[2]];
        let norm = dot(wh, wh).sqrt();
        if norm < 1e-12 {
            return None;
        }
        let cos = (dot(arm, wh) / norm).clamp(-1.0, 1.0);
        Some(cos.abs().acos())
    }

    #[test]
    fn constructed_alignment_gives_zero_then_right_angle() {
        let site = site47();
        let wind = arm_axis_equatorial(&site, StageAngle(0.0), 0.0);
        let a0 = arm_wind_angle(&site, StageAngle(0.0), wind, 0.0).unwrap();
        let a90 = arm_wind_angle(&site, StageAngle(FRAC_PI_2), wind, 0.0).unwrap();
        assert_abs_diff_eq!(a0, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a90, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn equatorial_wind_shifts_by_right_angle_after_six_hours() {
        // wind in the equatorial plane at right ascension zero; after a
        // quarter sidereal day its horizontal projection has swung by
        // exactly pi/2. (At the equator itself the projection is degenerate
        // or constant, so a mid-latitude site exercises the claim.)
        let site = site47();
        let wind = [1.0, 0.0, 0.0];
        let a0 = arm_wind_angle(&site, StageAngle(0.0), wind, 0.0).unwrap();
        let a6 = arm_wind_angle(&site, StageAngle(0.0), wind, 6.0).unwrap();
        assert_abs_diff_eq!((a0 - a6).abs(), FRAC_PI_2, epsilon = 1e-9);
        // acos in the oracle is ill-conditioned near perfect alignment, so
        // the cross-check tolerance is sqrt(eps)-scale
        let oracle0 = brute_force_angle(&site, 0.0, wind, 0.0).unwrap();
        let oracle6 = brute_force_angle(&site, 0.0, wind, 6.0).unwrap();
        assert_abs_diff_eq!(a0, oracle0, epsilon = 1e-7);
        assert_abs_diff_eq!(a6, oracle6, epsilon = 1e-7);
    }

    #[test]
    fn agrees_with_brute_force_oracle_over_grid() {
        let mut checked = 0usize;
        for &lat_deg in &[-63.0f64, -20.0, 11.0, 47.0, 78.0] {
            for &az_deg in &[0.0f64, 35.0, 120.0, 300.0] {
                let site = LabSite::new(lat_deg.to_radians(), az_deg.to_radians()).unwrap();
                for &t in &[0.0, 3.7, 6.0, 11.99, 17.2, 23.5] {
                    for &stage in &[0.0, 0.4, FRAC_PI_2, 2.0] {
                        // a fixed skewed wind, unit-normalized
                        let raw = [0.5f64, -0.62, 0.3];
                        let n = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
                        let wind = [raw[0] / n, raw[1] / n, raw[2] / n];
                        let got = arm_wind_angle(&site, StageAngle(stage), wind, t).unwrap();
                        let want = brute_force_angle(&site, stage, wind, t).unwrap();
                        assert_abs_diff_eq!(got, want, epsilon = 1e-9);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 400);
    }

    #[test]
    fn periodic_over_a_sidereal_day() {
        let site = site47();
        let wind = [0.6, 0.0, 0.8];
        for &t in &[0.0, 1.3, 9.9, 18.25] {
            let a = arm_wind_angle(&site, StageAngle(0.7), wind, t).unwrap();
            let b = arm_wind_angle(&site, StageAngle(0.7), wind, t + 24.0).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn rotation_covariance_of_line_angle() {
        let site = site47();
        let wind = [0.6, 0.0, 0.8];
        let base = arm_wind_line_angle(&site, StageAngle(0.3), wind, 5.0).unwrap();
        for &delta in &[0.1, 0.77, 1.9, 3.0] {
            let shifted =
                arm_wind_line_angle(&site, StageAngle::wrapped(0.3 + delta), wind, 5.0).unwrap();
            let expected = (base + delta).rem_euclid(PI);
            let diff = (shifted - expected).abs();
            assert!(diff < 1e-9 || (diff - PI).abs() < 1e-9, "delta={delta}: {shifted} vs {expected}");
        }
    }

    #[test]
    fn aligned_mode_matches_projected_construction() {
        let site = site47();
        let wind = arm_axis_equatorial(&site, StageAngle(0.0), 0.0);
        for stage in [StageAngle(0.0), StageAngle(FRAC_PI_2)] {
            let projected = arm_wind_angle(&site, stage, wind, 0.0).unwrap();
            let idealized = aligned_mode_angle(stage).unwrap();
            assert_abs_diff_eq!(projected, idealized, epsilon = 1e-9);
        }
    }

    #[test]
    fn aligned_mode_rejects_other_stages() {
        assert_eq!(aligned_mode_angle(StageAngle(0.0)).unwrap(), 0.0);
        assert_eq!(aligned_mode_angle(StageAngle(FRAC_PI_2)).unwrap(), FRAC_PI_2);
        assert!(matches!(
            aligned_mode_angle(StageAngle(0.3)),
            Err(Error::StageOutsideAlignedMode { .. })
        ));
    }

    #[test]
    fn vertical_wind_is_degenerate() {
        // at the equator at t = 0 the local vertical is exactly the
        // equatorial x axis, so this wind has no horizontal projection
        let site = LabSite::new(0.0, 0.0).unwrap();
        let wind = [1.0, 0.0, 0.0];
        let err = arm_wind_angle(&site, StageAngle(0.0), wind, 0.0).unwrap_err();
        assert_eq!(err, Error::DegenerateWindProjection);
        // six hours later the same wind lies in the horizontal plane
        assert!(arm_wind_angle(&site, StageAngle(0.0), wind, 6.0).is_ok());
        // a polar site sees an axis-aligned wind as permanently vertical
        let pole = LabSite::new(FRAC_PI_2, 0.0).unwrap();
        for &t in &[0.0, 5.0, 13.7] {
            let err = arm_wind_angle(&pole, StageAngle(0.0), [0.0, 0.0, 1.0], t).unwrap_err();
            assert_eq!(err, Error::DegenerateWindProjection);
        }
    }

    #[test]
    fn non_unit_wind_rejected() {
        let site = site47();
        let err = arm_wind_angle(&site, StageAngle(0.0), [1.0, 1.0, 0.0], 0.0).unwrap_err();
        assert!(matches!(err, Error::NotUnitVector { .. }));
    }

    #[test]
    fn site_validation() {
        assert!(LabSite::new(1.0, 0.0).is_ok());
        assert!(LabSite::new(2.0, 0.0).is_err());
        assert!(LabSite::new(0.5, -0.1).is_err());
        assert!(StageAngle::new(TAU).is_err());
        assert_abs_diff_eq!(StageAngle::wrapped(TAU + 0.25).0, 0.25, epsilon = 1e-12);
    }
}
