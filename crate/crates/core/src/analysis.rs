//! Statistical reduction of tallies: proportion estimates with Wilson score
//! intervals, the pooled two-proportion decision test, sample-size
//! requirements, and CHSH combinations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::Tally;

/// Two-sided 95% normal quantile used by the Wilson interval.
const Z_95: f64 = 1.959963984540054;

/// Default decision threshold, in units of the test statistic's sigma.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 5.0;

/// A binomial proportion with its 95% Wilson score interval. Wilson is used
/// instead of the Wald interval because operating points near phase 0 push
/// proportions against 0 and 1, where Wald collapses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub p_hat: f64,
    pub n: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 95% Wilson score interval for `successes` out of `n` (requires `n > 0`).
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    debug_assert!(n > 0 && successes <= n);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // boundary cases are exactly 0/1 in real arithmetic; pin them
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == n { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Estimate `P(a=b)` from post-selected coincidences.
pub fn estimate_p_same(tally: &Tally) -> Result<ProportionEstimate> {
    if tally.n_postselected == 0 {
        return Err(Error::EmptyTally);
    }
    let (ci_low, ci_high) = wilson_interval(tally.n_same, tally.n_postselected);
    Ok(ProportionEstimate {
        p_hat: tally.n_same as f64 / tally.n_postselected as f64,
        n: tally.n_postselected,
        ci_low,
        ci_high,
    })
}

/// Outcome of the before/after rotation comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftTest {
    pub p_before: ProportionEstimate,
    pub p_after: ProportionEstimate,
    /// Pooled two-proportion z statistic (before minus after).
    pub z: f64,
    pub sigma_threshold: f64,
    pub significant: bool,
}

/// Pooled two-proportion z test between two tallies. A zero pooled standard
/// error can only occur when both proportions sit on the same boundary, so
/// it reports z = 0.
pub fn two_proportion_z(before: &Tally, after: &Tally, sigma_threshold: f64) -> Result<ShiftTest> {
    let p_before = estimate_p_same(before)?;
    let p_after = estimate_p_same(after)?;
    let n1 = before.n_postselected as f64;
    let n2 = after.n_postselected as f64;
    let pooled = (before.n_same + after.n_same) as f64 / (n1 + n2);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let z = if se == 0.0 { 0.0 } else { (p_before.p_hat - p_after.p_hat) / se };
    Ok(ShiftTest {
        p_before,
        p_after,
        z,
        sigma_threshold,
        significant: z.abs() >= sigma_threshold,
    })
}

/// Smallest per-arm sample size n such that
/// `|p1 - p2| / sqrt(p1(1-p1)/n + p2(1-p2)/n) >= sigma`.
///
/// The comparison is evaluated in the rearranged form
/// `n (p1-p2)^2 >= sigma^2 (p1(1-p1) + p2(1-p2))`, which is algebraically
/// identical and avoids manufacturing round-off at the boundary n.
pub fn required_n_per_arm(p1: f64, p2: f64, sigma: f64) -> Result<u64> {
    for p in [p1, p2] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProportion { value: p });
        }
    }
    if p1 == p2 {
        return Err(Error::EqualProportions);
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::invalid_config("sigma", "must be finite and nonnegative"));
    }
    let delta_sq = (p1 - p2) * (p1 - p2);
    let variance_sum = p1 * (1.0 - p1) + p2 * (1.0 - p2);
    let satisfied = |n: u64| n as f64 * delta_sq >= sigma * sigma * variance_sum;
    let mut n = (sigma * sigma * variance_sum / delta_sq).ceil().max(1.0) as u64;
    while n > 1 && satisfied(n - 1) {
        n -= 1;
    }
    while !satisfied(n) {
        n += 1;
    }
    Ok(n)
}

/// Which correlator the CHSH combination subtracts. The optimal choice
/// depends on how settings are labelled, so it is explicit rather than
/// silently assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChshTerm {
    E11,
    E12,
    E21,
    #[default]
    E22,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
    pub s_value: f64,
    /// Combined standard error of `s_value` from the four binomial counts.
    pub s_standard_error: f64,
    pub subtracted: ChshTerm,
}

/// Correlator `E = (n_same - n_diff) / n_postselected` of one tally.
pub fn correlator(tally: &Tally) -> Result<f64> {
    if tally.n_postselected == 0 {
        return Err(Error::EmptyTally);
    }
    Ok((tally.n_same as f64 - tally.n_diff as f64) / tally.n_postselected as f64)
}

/// CHSH combination of four tallies ordered `[E11, E12, E21, E22]`, i.e.
/// setting pairs (a1,b1), (a1,b2), (a2,b1), (a2,b2).
pub fn chsh(tallies: &[Tally; 4], subtract: ChshTerm) -> Result<ChshResult> {
    let e: Vec<f64> = tallies.iter().map(correlator).collect::<Result<_>>()?;
    let signs = match subtract {
        ChshTerm::E11 => [-1.0, 1.0, 1.0, 1.0],
        ChshTerm::E12 => [1.0, -1.0, 1.0, 1.0],
        ChshTerm::E21 => [1.0, 1.0, -1.0, 1.0],
        ChshTerm::E22 => [1.0, 1.0, 1.0, -1.0],
    };
    let s_value = (signs[0] * e[0] + signs[1] * e[1] + signs[2] * e[2] + signs[3] * e[3]).abs();
    // Var(E) = 4 p(1-p) / n with p the same-outcome fraction
    let variance: f64 = tallies
        .iter()
        .map(|t| {
            let n = t.n_postselected as f64;
            let p = t.n_same as f64 / n;
            4.0 * p * (1.0 - p) / n
        })
        .sum();
    Ok(ChshResult {
        e11: e[0],
        e12: e[1],
        e21: e[2],
        e22: e[3],
        s_value,
        s_standard_error: variance.sqrt(),
        subtracted: subtract,
    })
}
