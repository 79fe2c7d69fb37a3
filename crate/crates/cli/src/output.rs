//! Serialization of campaign results: the pinned CSV schema, JSON reports,
//! and the run manifest.

use serde::Serialize;
use std::fmt::Write as _;

use etherbell::protocol::{CampaignConfig, ChshSettings, StagePointReport, SweepPoint};
use etherbell::analysis::ChshResult;

/// Stable sweep/rotation CSV header. Columns are floating point except the
/// model label and the four counters.
pub const CSV_HEADER: &str =
    "t_sidereal_h,stage_deg,model,n_pairs,n_postselected,n_same,n_diff,p_same,ci_low,ci_high";

/// 17 significant digits: enough to reproduce any f64 bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(
    out: &mut String,
    t_sidereal_h: f64,
    stage_deg: f64,
    model: &str,
    tally: &etherbell::montecarlo::Tally,
    estimate: &etherbell::analysis::ProportionEstimate,
) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        fmt_f64(t_sidereal_h),
        fmt_f64(stage_deg),
        model,
        tally.n_pairs,
        tally.n_postselected,
        tally.n_same,
        tally.n_diff,
        fmt_f64(estimate.p_hat),
        fmt_f64(estimate.ci_low),
        fmt_f64(estimate.ci_high),
    );
}

pub fn rotation_csv(points: &[StagePointReport], model: &str) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        csv_row(&mut out, p.t_sidereal_h, p.stage_deg, model, &p.tally, &p.estimate);
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint], model: &str) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        csv_row(&mut out, p.t_sidereal_h, p.stage_deg, model, &p.tally, &p.estimate);
    }
    out
}

#[derive(Serialize)]
pub struct BellReport<'a> {
    pub settings: &'a ChshSettings,
    pub events_per_setting: u64,
    pub result: &'a ChshResult,
}

/// Written alongside every data file; re-running the tool with the
/// manifest's config and seed reproduces the data files byte for byte
/// (timestamps excluded, which is why they live only here).
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub schema_version: u32,
    pub tool_version: &'a str,
    pub command: &'a str,
    pub master_seed: u64,
    pub config: &'a CampaignConfig,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}
