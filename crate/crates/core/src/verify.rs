//! Executable checks of the asymptotic claims about the `a_k` and of the
//! inequalities behind them.
//!
//! Limits (`|a_k| -> 1/pi`, `a_{k+1}/a_k -> -1`, `a_{k+1} + a_k = o(1/k)`) are
//! checked on finite schedules of `k` with pinned tolerances; finite-`k`
//! inequalities are checked exactly as stated over their whole range.
//!
//! Every check carries a rounding margin of ten times its arithmetic rounding
//! budget and only passes if it holds with that margin to spare.

use std::fmt;

use rug::Float;

use crate::coefficients::{build_table, series_tail_bound, z_series_eval, CoefficientTable};
use crate::error::{domain, MahlerError, Result};
use crate::integral::{
    mahler_integral_with_levels, zeta_mahler_integral_with_levels, UnitCirclePoint,
};
use crate::precision::{HpReal, PrecisionContext};
use crate::quadrature::DEFAULT_MAX_LEVEL;
use crate::special::{gamma_real, zeta_int};

/// Multiple of the rounding budget a check must clear.
pub const MARGIN_FACTOR: u32 = 10;
/// Precision escalation for the decay check stops here.
pub const MAX_ESCALATION_DIGITS: u32 = 2000;

/// How `observed`, `bound_or_target`, `tolerance` and `margin` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// `observed + margin <= bound + tolerance`
    AtMost,
    /// `observed - margin > bound`
    Above,
    /// `|observed - target| + margin <= tolerance`
    Within,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::AtMost => "at-most",
            Comparison::Above => "above",
            Comparison::Within => "within",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ClaimCheck {
    pub claim_id: String,
    /// The mathematical statement being checked, in plain notation.
    pub statement: String,
    pub observed: HpReal,
    pub bound_or_target: HpReal,
    pub tolerance: HpReal,
    pub margin: HpReal,
    pub comparison: Comparison,
    pub pass: bool,
    pub detail: String,
}

impl ClaimCheck {
    #[allow(clippy::too_many_arguments)]
    fn new(
        claim_id: impl Into<String>,
        statement: impl Into<String>,
        comparison: Comparison,
        observed: HpReal,
        bound_or_target: HpReal,
        tolerance: HpReal,
        margin: HpReal,
        detail: impl Into<String>,
    ) -> Self {
        let mut check = Self {
            claim_id: claim_id.into(),
            statement: statement.into(),
            observed,
            bound_or_target,
            tolerance,
            margin,
            comparison,
            pass: false,
            detail: detail.into(),
        };
        check.pass = check.holds();
        check
    }

    /// A check that could not be evaluated; always failed.
    pub fn errored(
        claim_id: impl Into<String>,
        statement: impl Into<String>,
        error: &MahlerError,
    ) -> Self {
        let nan = Float::with_val(64, f64::NAN);
        Self {
            claim_id: claim_id.into(),
            statement: statement.into(),
            observed: nan.clone(),
            bound_or_target: nan.clone(),
            tolerance: nan.clone(),
            margin: nan,
            comparison: Comparison::AtMost,
            pass: false,
            detail: error.to_string(),
        }
    }

    /// Re-evaluates the comparison from the stored fields.
    pub fn holds(&self) -> bool {
        let prec = self.observed.prec().max(self.bound_or_target.prec()) + 8;
        if self.observed.is_nan() || self.bound_or_target.is_nan() {
            return false;
        }
        match self.comparison {
            Comparison::AtMost => {
                let lhs = Float::with_val(prec, &self.observed + &self.margin);
                let rhs = Float::with_val(prec, &self.bound_or_target + &self.tolerance);
                lhs <= rhs
            }
            Comparison::Above => {
                Float::with_val(prec, &self.observed - &self.margin) > self.bound_or_target
            }
            Comparison::Within => {
                let gap = Float::with_val(prec, &self.observed - &self.bound_or_target).abs()
                    + &self.margin;
                gap <= self.tolerance
            }
        }
    }
}

/// Tolerance applied to every `k` in `from_k..=to_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub from_k: usize,
    pub to_k: usize,
    pub tolerance: f64,
}

impl Band {
    pub fn range(from_k: usize, to_k: usize, tolerance: f64) -> Self {
        Self {
            from_k,
            to_k,
            tolerance,
        }
    }

    pub fn at(k: usize, tolerance: f64) -> Self {
        Self::range(k, k, tolerance)
    }
}

/// Upper ends of the ranges the finite-`k` inequalities are checked over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityRanges {
    /// For `|a_k| <= 1`, the sign pattern and the monotonicity of `B_k`.
    pub coefficients: usize,
    /// For the zeta and eta difference bounds.
    pub differences: usize,
}

/// Finite-`k` schedules, tolerances and grids for a verification run.
#[derive(Debug, Clone)]
pub struct Schedules {
    pub big_o_last: usize,
    pub abs_limit: Vec<Band>,
    pub little_o_bounds: Vec<(usize, f64)>,
    pub little_o_decay: Vec<usize>,
    pub ratio_limit: Vec<Band>,
    pub inequality_ranges: InequalityRanges,
    pub s_grid: Vec<f64>,
    pub f_limit_points: Vec<f64>,
    pub quad_tol: f64,
    pub quad_max_level: u32,
    pub quad_max_k: usize,
    pub rotation_ks: Vec<u32>,
    pub rotation_angles: Vec<f64>,
    /// Flip the sign of `a_k` after building the table (fault injection).
    pub sign_flip: Option<usize>,
}

impl Schedules {
    /// Schedules pinned against a 420-digit reference run, clipped to a
    /// table of size `max_k`.
    pub fn for_max_k(max_k: usize) -> Self {
        let top = max_k.min(1000);
        let last_pair = max_k.saturating_sub(1).min(1000);
        let abs_limit = vec![Band::range(12, top, 1e-6), Band::range(30, top, 1e-10)];
        let ratio_limit = vec![Band::range(20, last_pair, 1e-4)];
        let little_o_decay = (0..7)
            .map(|i| 10usize << i)
            .filter(|&k| k < max_k)
            .collect();
        Self {
            big_o_last: max_k.saturating_sub(1).min(999),
            abs_limit,
            little_o_bounds: vec![(last_pair.max(10), 1e-3)],
            little_o_decay,
            ratio_limit,
            inequality_ranges: InequalityRanges {
                coefficients: max_k.min(1000),
                differences: max_k.min(200),
            },
            s_grid: vec![-0.9, -0.5, 0.0, 0.5, 0.9],
            f_limit_points: vec![0.9, 0.99],
            quad_tol: 1e-12,
            quad_max_level: DEFAULT_MAX_LEVEL,
            quad_max_k: 12,
            rotation_ks: vec![2, 3],
            rotation_angles: vec![0.0, 0.1, 0.25, 0.37, 0.5],
            sign_flip: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub digits: u32,
    pub guard_digits: u32,
    pub max_k: usize,
    pub checks: Vec<ClaimCheck>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn check(&self, claim_id: &str) -> Option<&ClaimCheck> {
        self.checks.iter().find(|c| c.claim_id == claim_id)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ClaimCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub mod ids {
    pub const BIG_O: &str = "a-sum-big-o";
    pub const ABS_LIMIT: &str = "abs-a-limit";
    pub const LITTLE_O_BOUND: &str = "a-sum-little-o-bound";
    pub const LITTLE_O_DECAY: &str = "a-sum-little-o-decay";
    pub const RATIO_LIMIT: &str = "a-ratio-limit";
    pub const ABS_A_AT_MOST_ONE: &str = "abs-a-at-most-one";
    pub const ZETA_DIFF: &str = "zeta-difference-bound";
    pub const ETA_DIFF: &str = "eta-difference-bound";
    pub const SIGN_PATTERN: &str = "a-sign-pattern";
    pub const ETA_INCREASING: &str = "eta-shifted-increasing";
    pub const ETA_LIMIT: &str = "eta-shifted-limit";
    pub const F_LIMIT: &str = "f-limit-closed-form";
    pub const F_TREND: &str = "f-limit-series-trend";
    pub const TABLE: &str = "table-construction";
}

// ---------------------------------------------------------------------------
// helpers

fn real(ctx: &PrecisionContext, x: f64) -> HpReal {
    ctx.from_f64(x)
}

/// `k |a_{k+1} + a_k|` and its rounding budget.
fn scaled_sum(table: &CoefficientTable, k: usize) -> (HpReal, HpReal) {
    let ctx = table.ctx();
    let a = table.a_values();
    let value = Float::with_val(ctx.prec(), &a[k + 1] + &a[k]).abs() * k as u64;
    let budget = (table.a_error_bound(k) + table.a_error_bound(k + 1)) * k as u64
        + Float::with_val(ctx.prec(), &value * ctx.unit_roundoff());
    (value, budget)
}

fn require_rows(table: &CoefficientTable, needed: usize) -> Result<()> {
    if needed > table.max_k() {
        Err(MahlerError::Range {
            index: needed,
            max: table.max_k(),
        })
    } else {
        Ok(())
    }
}

fn margin_of(budget: HpReal) -> HpReal {
    budget * MARGIN_FACTOR
}

/// Largest `k |a_{k+1} + a_k|` over `from..=to`, with its argmax.
pub fn max_scaled_sum(table: &CoefficientTable, from: usize, to: usize) -> Result<(usize, HpReal)> {
    require_rows(table, to + 1)?;
    let mut best: Option<(usize, HpReal)> = None;
    for k in from..=to {
        let (v, _) = scaled_sum(table, k);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((k, v));
        }
    }
    best.ok_or_else(|| domain("empty range"))
}

// ---------------------------------------------------------------------------
// asymptotic checks

/// `k |a_{k+1} + a_k| <= 5 (1 + zeta(2))` for `4 <= k <= max_k - 1`.
pub fn check_sum_bound(table: &CoefficientTable) -> Result<ClaimCheck> {
    check_sum_bound_upto(table, table.max_k().saturating_sub(1))
}

/// As [`check_sum_bound`], over `4 <= k <= last_k`.
pub fn check_sum_bound_upto(table: &CoefficientTable, last_k: usize) -> Result<ClaimCheck> {
    require_rows(table, 6)?;
    require_rows(table, last_k + 1)?;
    if last_k < 5 {
        return Err(MahlerError::Range {
            index: 5,
            max: last_k,
        });
    }
    let ctx = table.ctx();
    let zeta2 = zeta_int(2, ctx)?;
    let bound = Float::with_val(ctx.prec(), zeta2 + 1u32) * 5u32;
    let mut worst: Option<(usize, HpReal)> = None;
    let mut budget = ctx.zero();
    for k in 4..=last_k {
        let (v, b) = scaled_sum(table, k);
        if b > budget {
            budget = b;
        }
        if worst.as_ref().is_none_or(|(_, w)| v > *w) {
            worst = Some((k, v));
        }
    }
    let (argmax, observed) = worst.expect("range is non-empty");
    let detail = format!(
        "max over 4 <= k <= {last_k} attained at k = {argmax}; bound 5(1 + zeta(2)) evaluated at runtime"
    );
    Ok(ClaimCheck::new(
        ids::BIG_O,
        "k |a_{k+1} + a_k| <= 5 (1 + zeta(2)) for all k >= 4",
        Comparison::AtMost,
        observed,
        bound,
        ctx.zero(),
        margin_of(budget),
        detail,
    ))
}

fn band_worst<F>(
    table: &CoefficientTable,
    bands: &[Band],
    min_k: usize,
    mut deviation: F,
) -> Result<(usize, HpReal, HpReal, HpReal, f64)>
where
    F: FnMut(usize) -> Result<(HpReal, HpReal, HpReal)>,
{
    if bands.is_empty() {
        return Err(MahlerError::Usage("empty tolerance schedule".into()));
    }
    let ctx = table.ctx();
    // (k, observed, target, budget, tolerance, ratio)
    let mut worst: Option<(usize, HpReal, HpReal, HpReal, f64, f64)> = None;
    for band in bands {
        if band.from_k < min_k {
            return Err(MahlerError::Usage(format!(
                "schedule starts at k = {} but the check needs k >= {min_k}",
                band.from_k
            )));
        }
        if band.from_k > band.to_k {
            return Err(MahlerError::Range {
                index: band.from_k,
                max: band.to_k.min(table.max_k()),
            });
        }
        for k in band.from_k..=band.to_k {
            let (observed, target, budget) = deviation(k)?;
            let gap = Float::with_val(ctx.prec(), &observed - &target).abs()
                + Float::with_val(ctx.prec(), &budget * MARGIN_FACTOR);
            let ratio = gap.to_f64() / band.tolerance;
            if worst.as_ref().is_none_or(|w| ratio > w.5) {
                worst = Some((k, observed, target, budget, band.tolerance, ratio));
            }
        }
    }
    let (k, observed, target, budget, tol, _) = worst.expect("bands are non-empty");
    Ok((k, observed, target, budget, tol))
}

/// `| |a_k| - 1/pi | <= tolerance` for every `k` in the schedule.
pub fn check_abs_limit(table: &CoefficientTable, bands: &[Band]) -> Result<ClaimCheck> {
    let ctx = table.ctx();
    let inv_pi = ctx.inv_pi();
    let (k, observed, target, budget, tol) = band_worst(table, bands, 2, |k| {
        require_rows(table, k)?;
        let abs = Float::with_val(ctx.prec(), table.a_values()[k].abs_ref());
        let budget =
            table.a_error_bound(k) + Float::with_val(ctx.prec(), &inv_pi * ctx.unit_roundoff());
        Ok((abs, inv_pi.clone(), budget))
    })?;
    let detail = format!(
        "worst relative to its tolerance at k = {k} (|a_k| - 1/pi = {:.3e}); tolerances pinned by a reference run",
        Float::with_val(ctx.prec(), &observed - &target).to_f64()
    );
    Ok(ClaimCheck::new(
        ids::ABS_LIMIT,
        "|a_k| -> 1/pi",
        Comparison::Within,
        observed,
        target,
        real(ctx, tol),
        margin_of(budget),
        detail,
    ))
}

/// `|a_{k+1}/a_k + 1| <= tolerance` for every `k` in the schedule (`k >= 2`).
pub fn check_ratio_limit(table: &CoefficientTable, bands: &[Band]) -> Result<ClaimCheck> {
    let ctx = table.ctx();
    let (k, observed, target, budget, tol) = band_worst(table, bands, 2, |k| {
        require_rows(table, k + 1)?;
        let a = table.a_values();
        let sum = Float::with_val(ctx.prec(), &a[k + 1] + &a[k]);
        let ratio_plus_one = Float::with_val(ctx.prec(), &sum / &a[k]);
        let ratio = Float::with_val(ctx.prec(), &ratio_plus_one - 1u32);
        let rel = (table.a_error_bound(k) + table.a_error_bound(k + 1))
            / Float::with_val(ctx.prec(), a[k].abs_ref());
        let budget = rel * 2u32 + ctx.unit_roundoff() * 4u32;
        Ok((ratio, real(ctx, -1.0), budget))
    })?;
    let detail = format!(
        "worst relative to its tolerance at k = {k} (a_(k+1)/a_k + 1 = {:.3e}); tolerances pinned by a reference run",
        Float::with_val(ctx.prec(), &observed + 1u32).to_f64()
    );
    Ok(ClaimCheck::new(
        ids::RATIO_LIMIT,
        "a_{k+1} / a_k -> -1",
        Comparison::Within,
        observed,
        target,
        real(ctx, tol),
        margin_of(budget),
        detail,
    ))
}

/// Sampled `k |a_{k+1} + a_k|` values resolved above their rounding margin.
#[derive(Debug, Clone)]
pub struct ResolvedSamples {
    pub samples: Vec<(usize, HpReal, HpReal)>,
    /// Decimal digits of the table the samples were finally read from.
    pub digits: u32,
    pub resolved: bool,
}

/// Reads `k |a_{k+1} + a_k|` at each sample, rebuilding the table at doubled
/// precision until every sample exceeds its rounding margin.
pub fn resolve_scaled_sums(table: &CoefficientTable, samples: &[usize]) -> Result<ResolvedSamples> {
    let Some(&top) = samples.iter().max() else {
        return Ok(ResolvedSamples {
            samples: Vec::new(),
            digits: table.ctx().digits(),
            resolved: true,
        });
    };
    require_rows(table, top + 1)?;
    let base = table.ctx();
    let mut rebuilt: Option<CoefficientTable> = None;
    loop {
        let current = rebuilt.as_ref().unwrap_or(table);
        let values: Vec<_> = samples
            .iter()
            .map(|&k| {
                let (v, b) = scaled_sum(current, k);
                (k, v, b)
            })
            .collect();
        let resolved = values
            .iter()
            .all(|(_, v, b)| *v > Float::with_val(v.prec(), b * MARGIN_FACTOR));
        let digits = current.ctx().digits();
        if resolved || digits >= MAX_ESCALATION_DIGITS {
            return Ok(ResolvedSamples {
                samples: values,
                digits,
                resolved,
            });
        }
        let next =
            PrecisionContext::new((digits * 2).min(MAX_ESCALATION_DIGITS), base.guard_digits())?
                .with_exec(base.exec())
                .with_term_budget(base.term_budget());
        rebuilt = Some(build_table(top + 1, &next)?);
    }
}

/// `a_{k+1} + a_k = o(1/k)`, rendered as an upper bound on `k |a_{k+1} + a_k|`
/// at each listed `k` plus strict decay along the sampled subsequence.
pub fn check_sum_little_o(
    table: &CoefficientTable,
    bounds: &[(usize, f64)],
    decay_samples: &[usize],
) -> Result<Vec<ClaimCheck>> {
    let ctx = table.ctx();
    if bounds.is_empty() {
        return Err(MahlerError::Usage("empty bound schedule".into()));
    }
    // Bound part: worst ratio observed / bound.
    let mut worst: Option<(usize, HpReal, HpReal, f64, f64)> = None;
    for &(k, bound) in bounds {
        require_rows(table, k + 1)?;
        let (v, b) = scaled_sum(table, k);
        let ratio = ((Float::with_val(ctx.prec(), &b * MARGIN_FACTOR) + &v) / bound).to_f64();
        if worst.as_ref().is_none_or(|w| ratio > w.4) {
            worst = Some((k, v, b, bound, ratio));
        }
    }
    let (k, observed, budget, bound, _) = worst.expect("bounds are non-empty");
    let bound_check = ClaimCheck::new(
        ids::LITTLE_O_BOUND,
        "k |a_{k+1} + a_k| -> 0 (bound at listed k)",
        Comparison::AtMost,
        observed,
        real(ctx, bound),
        ctx.zero(),
        margin_of(budget),
        format!("tightest at k = {k}; bounds pinned by a reference run"),
    );

    // Decay part: largest ratio between consecutive samples must stay below 1.
    let mut samples: Vec<usize> = decay_samples.to_vec();
    samples.sort_unstable();
    samples.dedup();
    let decay_check = if samples.len() < 2 {
        ClaimCheck::new(
            ids::LITTLE_O_DECAY,
            "k |a_{k+1} + a_k| strictly decreasing along the sampled k",
            Comparison::AtMost,
            ctx.zero(),
            ctx.int(1),
            ctx.zero(),
            ctx.zero(),
            format!("fewer than two samples within the table ({samples:?}); nothing to compare"),
        )
    } else {
        let resolved = resolve_scaled_sums(table, &samples)?;
        let prec = resolved.samples[0].1.prec();
        let mut worst_ratio = Float::with_val(prec, f64::NEG_INFINITY);
        let mut worst_margin = Float::new(prec);
        let mut at = 0;
        for pair in resolved.samples.windows(2) {
            let (_, v0, b0) = &pair[0];
            let (k1, v1, b1) = &pair[1];
            let ratio = Float::with_val(prec, v1 / v0);
            let rel = Float::with_val(prec, b0 / v0) + Float::with_val(prec, b1 / v1);
            if ratio > worst_ratio {
                worst_margin = Float::with_val(prec, &ratio * rel) * MARGIN_FACTOR;
                worst_ratio = ratio;
                at = *k1;
            }
        }
        let listing: Vec<String> = resolved
            .samples
            .iter()
            .map(|(k, v, _)| format!("{k}:{:.3e}", v))
            .collect();
        let mut detail = format!(
            "largest successive ratio at k = {at}; values read at {} digits [{}]",
            resolved.digits,
            listing.join(", ")
        );
        if !resolved.resolved {
            detail.push_str("; some samples stay below their rounding margin");
            worst_margin = Float::with_val(prec, f64::INFINITY);
        }
        ClaimCheck::new(
            ids::LITTLE_O_DECAY,
            "k |a_{k+1} + a_k| strictly decreasing along the sampled k",
            Comparison::AtMost,
            worst_ratio,
            ctx.int(1),
            ctx.zero(),
            worst_margin,
            detail,
        )
    };
    Ok(vec![bound_check, decay_check])
}

// ---------------------------------------------------------------------------
// inequalities

/// `|a_k| <= 1`; zeta and eta difference bounds; the sign pattern; the
/// monotonicity and limit of `B_k = eta(k+1)`.
pub fn check_inequalities(
    table: &CoefficientTable,
    ctx: &PrecisionContext,
    ranges: &InequalityRanges,
) -> Result<Vec<ClaimCheck>> {
    let n = ranges.coefficients;
    let d = ranges.differences;
    require_rows(table, n.max(d))?;
    let u = ctx.unit_roundoff();
    let a = table.a_values();
    let mut checks = Vec::with_capacity(6);

    // |a_k| <= 1
    let (mut k_max_abs, mut max_abs, mut budget) = (1usize, ctx.zero(), ctx.zero());
    for k in 1..=n {
        let abs = Float::with_val(ctx.prec(), a[k].abs_ref());
        if abs > max_abs {
            max_abs = abs;
            k_max_abs = k;
            budget = table.a_error_bound(k);
        }
    }
    checks.push(ClaimCheck::new(
        ids::ABS_A_AT_MOST_ONE,
        "|a_k| <= 1 for all k >= 1",
        Comparison::AtMost,
        max_abs,
        ctx.int(1),
        ctx.zero(),
        margin_of(budget),
        format!("max over 1 <= k <= {n} at k = {k_max_abs}"),
    ));

    // zeta(k) - zeta(k+1) <= 1/k^2 for k >= 4, reported as max k^2 (zeta(k) - zeta(k+1)).
    if d >= 4 {
        let zetas: Vec<HpReal> = ctx
            .exec()
            .map_range(4..d + 2, |k| zeta_int(k as u32, ctx))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut worst = (
            4usize,
            Float::with_val(ctx.prec(), f64::NEG_INFINITY),
            ctx.zero(),
        );
        for k in 4..=d {
            let hi = &zetas[k - 4];
            let lo = &zetas[k - 3];
            let diff = Float::with_val(hi.prec(), hi - lo);
            let scaled = Float::with_val(ctx.prec(), &diff * (k as u64 * k as u64));
            if scaled > worst.1 {
                let excess = Float::with_val(ctx.prec(), hi - 1u32);
                worst = (k, scaled, excess * &u * (4 * k as u64 * k as u64));
            }
        }
        let z4 = Float::with_val(ctx.prec(), &zetas[0] - &zetas[1]);
        checks.push(ClaimCheck::new(
            ids::ZETA_DIFF,
            "zeta(k) - zeta(k+1) <= 1/k^2 for k >= 4 (reported as max k^2 (zeta(k) - zeta(k+1)))",
            Comparison::AtMost,
            worst.1,
            ctx.int(1),
            ctx.zero(),
            margin_of(worst.2),
            format!(
                "max over 4 <= k <= {d} at k = {}; zeta(4) - zeta(5) = {:.6} vs 1/16 = 0.0625",
                worst.0,
                z4.to_f64()
            ),
        ));
    } else {
        checks.push(ClaimCheck::errored(
            ids::ZETA_DIFF,
            "zeta(k) - zeta(k+1) <= 1/k^2 for k >= 4",
            &MahlerError::Range { index: 4, max: d },
        ));
    }

    // B_k - B_{k-1} <= 1/k^2 for k >= 2, reported as max k^2 (B_k - B_{k-1}).
    let mut worst = (
        2usize,
        Float::with_val(ctx.prec(), f64::NEG_INFINITY),
        ctx.zero(),
    );
    let mut b21 = ctx.zero();
    for k in 2..=d {
        let hi = table.eta_shifted(k)?;
        let lo = table.eta_shifted(k - 1)?;
        let diff = Float::with_val(hi.prec().max(lo.prec()), hi - lo);
        if k == 2 {
            b21 = Float::with_val(ctx.prec(), &diff);
        }
        let scaled = Float::with_val(ctx.prec(), &diff * (k as u64 * k as u64));
        if scaled > worst.1 {
            let comp = Float::with_val(ctx.prec(), 1u32 - lo);
            worst = (k, scaled, comp * &u * (4 * k as u64 * k as u64));
        }
    }
    checks.push(ClaimCheck::new(
        ids::ETA_DIFF,
        "B_k - B_{k-1} <= 1/k^2 for k >= 2, B_k = eta(k+1) (reported as max k^2 (B_k - B_{k-1}))",
        Comparison::AtMost,
        worst.1,
        ctx.int(1),
        ctx.zero(),
        margin_of(worst.2),
        format!(
            "max over 2 <= k <= {d} at k = {}; B_2 - B_1 = {:.7}",
            worst.0,
            b21.to_f64()
        ),
    ));

    // sign(a_k) = (-1)^k for k >= 2, reported as min (-1)^k a_k.
    let mut min_signed: Option<(usize, HpReal)> = None;
    let mut first_violation = None;
    for (k, ak) in a.iter().enumerate().take(n + 1).skip(2) {
        let signed = if k % 2 == 0 {
            Float::with_val(ctx.prec(), ak)
        } else {
            Float::with_val(ctx.prec(), -ak)
        };
        if first_violation.is_none() && signed <= 0 {
            first_violation = Some(k);
        }
        if min_signed.as_ref().is_none_or(|(_, m)| signed < *m) {
            min_signed = Some((k, signed));
        }
    }
    let (k_min, observed) = min_signed.expect("range 2..=n is non-empty");
    let detail = match first_violation {
        Some(k) => format!("sign pattern broken; first violation at k = {k}"),
        None => format!("min over 2 <= k <= {n} of (-1)^k a_k at k = {k_min}"),
    };
    checks.push(ClaimCheck::new(
        ids::SIGN_PATTERN,
        "a_{2k} > 0 and a_{2k+1} < 0 for k >= 1 (reported as min (-1)^k a_k)",
        Comparison::Above,
        observed,
        ctx.zero(),
        ctx.zero(),
        margin_of(table.a_error_bound(k_min)),
        detail,
    ));

    // B_k strictly increasing and below 1: max (1 - B_k)/(1 - B_{k-1}) < 1.
    let complement = |k: usize| -> Result<HpReal> {
        let b = table.eta_shifted(k)?;
        Ok(Float::with_val(b.prec(), 1u32 - b))
    };
    let mut worst = (2usize, Float::with_val(ctx.prec(), f64::NEG_INFINITY));
    let mut previous = complement(1)?;
    let mut below_one = previous > 0;
    for k in 2..=n {
        let current = complement(k)?;
        below_one &= current > 0;
        let ratio = Float::with_val(ctx.prec(), &current / &previous);
        if ratio > worst.1 {
            worst = (k, ratio);
        }
        previous = current;
    }
    let observed = if below_one {
        worst.1
    } else {
        Float::with_val(ctx.prec(), f64::INFINITY)
    };
    checks.push(ClaimCheck::new(
        ids::ETA_INCREASING,
        "B_k increasing with B_k < 1 (reported as max (1 - B_k)/(1 - B_{k-1}))",
        Comparison::AtMost,
        observed,
        ctx.int(1),
        ctx.zero(),
        margin_of(Float::with_val(ctx.prec(), &u * 8u32)),
        format!("max over 2 <= k <= {n} at k = {}", worst.0),
    ));

    // B_k -> 1: 1 - B_n <= 3 2^-(n+1).
    let gap = complement(n)?;
    let mut bound = Float::with_val(ctx.prec(), 3u32);
    bound >>= n as u32 + 1;
    checks.push(ClaimCheck::new(
        ids::ETA_LIMIT,
        "B_k -> 1 (checked as 1 - B_n <= 3 * 2^-(n+1))",
        Comparison::AtMost,
        Float::with_val(ctx.prec(), &gap),
        bound,
        ctx.zero(),
        margin_of(Float::with_val(ctx.prec(), &gap * &u) * 4u32),
        format!("n = {n}"),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// closed forms

/// `Gamma(s+1) / Gamma(s/2+1)^2` for `-1 < s <= 2`.
pub fn z_closed_form(s: &HpReal, ctx: &PrecisionContext) -> Result<HpReal> {
    let prec = ctx.prec();
    let num = gamma_real(&Float::with_val(prec, s + 1u32), ctx)?;
    let half = Float::with_val(prec, s / 2u32) + 1u32;
    let den = gamma_real(&half, ctx)?.square();
    Ok(num / den)
}

/// `(4/s) Gamma(s) / Gamma(s/2)^2` for `0 < s <= 3`.
pub fn z_closed_form_reduced(s: &HpReal, ctx: &PrecisionContext) -> Result<HpReal> {
    if *s <= 0 {
        return Err(domain("the reduced Gamma form needs s > 0"));
    }
    let prec = ctx.prec();
    let num = gamma_real(s, ctx)?;
    let den = gamma_real(&Float::with_val(prec, s / 2u32), ctx)?.square();
    Ok(num / den * 4u32 / s)
}

/// `Gamma(2-s) / Gamma(1-s/2)^2`, the continuation of `(1-s) Z(-s)` to `s = 1`.
pub fn f_closed_form(s: &HpReal, ctx: &PrecisionContext) -> Result<HpReal> {
    let prec = ctx.prec();
    let num = gamma_real(&Float::with_val(prec, 2u32 - s), ctx)?;
    let half = 1u32 - Float::with_val(prec, s / 2u32);
    let den = gamma_real(&half, ctx)?.square();
    Ok(num / den)
}

fn s_label(s: f64) -> String {
    format!("{s}")
}

/// Series against closed form on `s_grid`, agreement of the two Gamma forms
/// for `s in (0, 1)`, and the `F(s) -> 1/pi` checks.
pub fn check_closed_forms(
    table: &CoefficientTable,
    ctx: &PrecisionContext,
    s_grid: &[f64],
    f_limit_points: &[f64],
) -> Result<Vec<ClaimCheck>> {
    let mut checks = Vec::new();
    let slack = ctx.pow10(3 - ctx.digits() as i32);
    for &sv in s_grid {
        if !(sv > -1.0 && sv < 1.0) {
            return Err(domain(format!("grid point {sv} is outside (-1, 1)")));
        }
        let s = real(ctx, sv);
        let id = format!("gf-series-vs-gamma@s={}", s_label(sv));
        let statement = "sum a_k s^k = Gamma(s+1) / Gamma(s/2+1)^2";
        let tail = series_tail_bound(&s, table.max_k(), ctx);
        let tail_tol = Float::with_val(ctx.prec(), &tail + &slack);
        let check = z_series_eval(&s, table, &tail_tol).and_then(|series| {
            let closed = z_closed_form(&s, ctx)?;
            Ok(ClaimCheck::new(
                id.clone(),
                statement,
                Comparison::Within,
                series.value,
                closed,
                Float::with_val(ctx.prec(), &series.tail_bound + &slack),
                ctx.zero(),
                format!(
                    "K = {}, certified tail {:.3e}",
                    table.max_k(),
                    series.tail_bound.to_f64()
                ),
            ))
        });
        checks.push(check.unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e)));

        if sv > 0.0 {
            let id = format!("gamma-forms@s={}", s_label(sv));
            let statement = "Gamma(s+1) / Gamma(s/2+1)^2 = (4/s) Gamma(s) / Gamma(s/2)^2";
            let check = z_closed_form(&s, ctx).and_then(|lhs| {
                let rhs = z_closed_form_reduced(&s, ctx)?;
                Ok(ClaimCheck::new(
                    id.clone(),
                    statement,
                    Comparison::Within,
                    rhs,
                    lhs,
                    slack.clone(),
                    ctx.zero(),
                    "both sides through gamma_real",
                ))
            });
            checks.push(check.unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e)));
        }
    }

    // F(1) = Gamma(1) / Gamma(1/2)^2 = 1/pi
    let f1 = f_closed_form(&ctx.int(1), ctx)?;
    checks.push(ClaimCheck::new(
        ids::F_LIMIT,
        "(1-s) Z(-s) -> 1/pi as s -> 1-, via Gamma(2-s) / Gamma(1-s/2)^2 at s = 1",
        Comparison::Within,
        f1,
        ctx.inv_pi(),
        ctx.pow10(5 - ctx.digits() as i32),
        ctx.zero(),
        "Gamma(1/2) = sqrt(pi)",
    ));

    // (1-s) Z(-s) through the series approaches 1/pi: deviation shrinks along the points.
    let statement =
        "(1-s) sum a_k (-s)^k approaches 1/pi as s -> 1- (reported as max deviation ratio)";
    let trend = (|| -> Result<ClaimCheck> {
        if f_limit_points.len() < 2 {
            return Err(MahlerError::Usage(
                "need at least two points for the trend".into(),
            ));
        }
        let inv_pi = ctx.inv_pi();
        let mut rows = Vec::new();
        for &sv in f_limit_points {
            let s = real(ctx, sv);
            let neg = Float::with_val(ctx.prec(), -&s);
            let tail = series_tail_bound(&neg, table.max_k(), ctx);
            let series = z_series_eval(&neg, table, &tail)?;
            let factor = Float::with_val(ctx.prec(), 1u32 - &s);
            let value = Float::with_val(ctx.prec(), &series.value * &factor);
            let err = Float::with_val(ctx.prec(), &series.tail_bound * &factor);
            let dev = Float::with_val(ctx.prec(), &value - &inv_pi).abs();
            rows.push((sv, dev, err));
        }
        // each deviation (plus its uncertainty) must fall below the previous (minus its uncertainty)
        let mut worst = Float::with_val(ctx.prec(), f64::NEG_INFINITY);
        for pair in rows.windows(2) {
            let hi = Float::with_val(ctx.prec(), &pair[0].1 - &pair[0].2);
            let lo = Float::with_val(ctx.prec(), &pair[1].1 + &pair[1].2);
            let ratio = if hi > 0 {
                lo / hi
            } else {
                Float::with_val(ctx.prec(), f64::INFINITY)
            };
            if ratio > worst {
                worst = ratio;
            }
        }
        let listing: Vec<String> = rows
            .iter()
            .map(|(s, dev, err)| {
                format!(
                    "s={s}: |F - 1/pi| = {:.4e} (+/- {:.1e})",
                    dev.to_f64(),
                    err.to_f64()
                )
            })
            .collect();
        Ok(ClaimCheck::new(
            ids::F_TREND,
            statement,
            Comparison::AtMost,
            worst,
            ctx.int(1),
            ctx.zero(),
            ctx.zero(),
            listing.join("; "),
        ))
    })();
    checks.push(trend.unwrap_or_else(|e| ClaimCheck::errored(ids::F_TREND, statement, &e)));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// quadrature checks

fn quad_tol(schedules: &Schedules, ctx: &PrecisionContext) -> HpReal {
    real(ctx, schedules.quad_tol)
}

/// Quadrature of `m_k` at `r = 1` against the recurrence value.
pub fn check_mk_quadrature(
    table: &CoefficientTable,
    k: usize,
    schedules: &Schedules,
) -> ClaimCheck {
    let ctx = table.ctx();
    let id = format!("mk-quadrature@k={k}");
    let statement = "int_0^1 log^k |e^(2 pi i t) - 1| dt = k! a_k";
    let run = || -> Result<ClaimCheck> {
        require_rows(table, k)?;
        let q = mahler_integral_with_levels(
            k as u32,
            &UnitCirclePoint::one(ctx),
            &quad_tol(schedules, ctx),
            schedules.quad_max_level,
            ctx,
        )?;
        let m = &table.m_values()[k];
        let budget = Float::with_val(ctx.prec(), table.a_error_bound(k) * m)
            / Float::with_val(ctx.prec(), table.a_values()[k].abs_ref());
        let budget = if budget.is_nan() { ctx.zero() } else { budget };
        Ok(ClaimCheck::new(
            id.clone(),
            statement,
            Comparison::Within,
            q.value,
            m.clone(),
            Float::with_val(ctx.prec(), &q.error_estimate + budget * 2u32),
            ctx.zero(),
            format!(
                "levels {}, nodes {}, estimate {:.3e}",
                q.levels,
                q.nodes,
                q.error_estimate.to_f64()
            ),
        ))
    };
    run().unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e))
}

/// Quadrature of `Z(s)` at `r = 1` against the Gamma closed form.
pub fn check_z_quadrature(s: f64, schedules: &Schedules, ctx: &PrecisionContext) -> ClaimCheck {
    let id = format!("z-quadrature@s={}", s_label(s));
    let statement = "int_0^1 |e^(2 pi i t) - 1|^s dt = Gamma(s+1) / Gamma(s/2+1)^2";
    let run = || -> Result<ClaimCheck> {
        let sv = real(ctx, s);
        let q = zeta_mahler_integral_with_levels(
            &sv,
            &UnitCirclePoint::one(ctx),
            &quad_tol(schedules, ctx),
            schedules.quad_max_level,
            ctx,
        )?;
        let closed = z_closed_form(&sv, ctx)?;
        Ok(ClaimCheck::new(
            id.clone(),
            statement,
            Comparison::Within,
            q.value,
            closed,
            Float::with_val(
                ctx.prec(),
                &q.error_estimate + ctx.pow10(3 - ctx.digits() as i32),
            ),
            ctx.zero(),
            format!("levels {}, nodes {}", q.levels, q.nodes),
        ))
    };
    run().unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e))
}

/// `m_k` by quadrature at several roots on the circle; all must agree within
/// twice the quadrature tolerance.
pub fn check_rotation_invariance(
    k: u32,
    schedules: &Schedules,
    ctx: &PrecisionContext,
) -> ClaimCheck {
    let id = format!("rotation-invariance@k={k}");
    let statement = "m_k(x - r) does not depend on r on the unit circle";
    let run = || -> Result<ClaimCheck> {
        let tol = quad_tol(schedules, ctx);
        let values: Vec<HpReal> = ctx
            .exec()
            .map(&schedules.rotation_angles, |&phi| {
                let point = UnitCirclePoint::from_f64(phi, ctx)?;
                mahler_integral_with_levels(k, &point, &tol, schedules.quad_max_level, ctx)
                    .map(|q| q.value)
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let mut spread = ctx.zero();
        for (i, x) in values.iter().enumerate() {
            for y in &values[i + 1..] {
                let d = Float::with_val(ctx.prec(), x - y).abs();
                if d > spread {
                    spread = d;
                }
            }
        }
        Ok(ClaimCheck::new(
            id.clone(),
            statement,
            Comparison::AtMost,
            spread,
            Float::with_val(ctx.prec(), &tol * 2u32),
            ctx.zero(),
            ctx.zero(),
            format!("angles {:?}", schedules.rotation_angles),
        ))
    };
    run().unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e))
}

// ---------------------------------------------------------------------------
// driver

enum Task {
    SumBound,
    AbsLimit,
    SumLittleO,
    RatioLimit,
    Inequalities,
    ClosedForms,
    MkQuadrature(usize),
    ZQuadrature(f64),
    Rotation(u32),
}

fn run_task(
    task: &Task,
    table: &CoefficientTable,
    ctx: &PrecisionContext,
    schedules: &Schedules,
) -> Vec<ClaimCheck> {
    let one = |id: &str, statement: &str, r: Result<ClaimCheck>| {
        vec![r.unwrap_or_else(|e| ClaimCheck::errored(id, statement, &e))]
    };
    match task {
        Task::SumBound => one(
            ids::BIG_O,
            "k |a_{k+1} + a_k| <= 5 (1 + zeta(2)) for all k >= 4",
            check_sum_bound_upto(table, schedules.big_o_last),
        ),
        Task::AbsLimit => one(
            ids::ABS_LIMIT,
            "|a_k| -> 1/pi",
            check_abs_limit(table, &schedules.abs_limit),
        ),
        Task::RatioLimit => one(
            ids::RATIO_LIMIT,
            "a_{k+1} / a_k -> -1",
            check_ratio_limit(table, &schedules.ratio_limit),
        ),
        Task::SumLittleO => {
            check_sum_little_o(table, &schedules.little_o_bounds, &schedules.little_o_decay)
                .unwrap_or_else(|e| {
                    vec![
                        ClaimCheck::errored(
                            ids::LITTLE_O_BOUND,
                            "k |a_{k+1} + a_k| -> 0 (bound at listed k)",
                            &e,
                        ),
                        ClaimCheck::errored(
                            ids::LITTLE_O_DECAY,
                            "k |a_{k+1} + a_k| strictly decreasing along the sampled k",
                            &e,
                        ),
                    ]
                })
        }
        Task::Inequalities => {
            check_inequalities(table, ctx, &schedules.inequality_ranges).unwrap_or_else(|e| {
                vec![ClaimCheck::errored(
                    "inequalities",
                    "finite-k inequalities and sign pattern",
                    &e,
                )]
            })
        }
        Task::ClosedForms => {
            check_closed_forms(table, ctx, &schedules.s_grid, &schedules.f_limit_points)
                .unwrap_or_else(|e| {
                    vec![ClaimCheck::errored(
                        "closed-forms",
                        "Gamma closed forms",
                        &e,
                    )]
                })
        }
        Task::MkQuadrature(k) => vec![check_mk_quadrature(table, *k, schedules)],
        Task::ZQuadrature(s) => vec![check_z_quadrature(*s, schedules, ctx)],
        Task::Rotation(k) => vec![check_rotation_invariance(*k, schedules, ctx)],
    }
}

/// Builds the table once and runs every check; errors inside individual
/// checks become failed [`ClaimCheck`]s. Only an invalid context aborts.
pub fn run_all(
    max_k: usize,
    ctx: &PrecisionContext,
    schedules: &Schedules,
) -> Result<VerificationReport> {
    let table = match build_table(max_k, ctx) {
        Ok(mut t) => {
            if let Some(k) = schedules.sign_flip {
                t.inject_sign_flip(k)?;
            }
            t
        }
        Err(e) => {
            let checks = vec![ClaimCheck::errored(
                ids::TABLE,
                "coefficient table construction",
                &e,
            )];
            return Ok(VerificationReport {
                digits: ctx.digits(),
                guard_digits: ctx.guard_digits(),
                max_k,
                checks,
                overall_pass: false,
            });
        }
    };

    let mut tasks = vec![
        Task::SumBound,
        Task::AbsLimit,
        Task::SumLittleO,
        Task::RatioLimit,
        Task::Inequalities,
        Task::ClosedForms,
    ];
    tasks.extend((0..=schedules.quad_max_k.min(max_k)).map(Task::MkQuadrature));
    let mut z_grid = schedules.s_grid.clone();
    if !z_grid.contains(&1.0) {
        z_grid.push(1.0);
    }
    tasks.extend(z_grid.into_iter().map(Task::ZQuadrature));
    tasks.extend(schedules.rotation_ks.iter().copied().map(Task::Rotation));

    let checks: Vec<ClaimCheck> = ctx
        .exec()
        .map(&tasks, |task| run_task(task, &table, ctx, schedules))
        .into_iter()
        .flatten()
        .collect();
    let overall_pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        digits: ctx.digits(),
        guard_digits: ctx.guard_digits(),
        max_k,
        checks,
        overall_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(30).unwrap()
    }

    #[test]
    fn comparison_semantics() {
        let c = ctx();
        let at_most = ClaimCheck::new(
            "x",
            "",
            Comparison::AtMost,
            c.int(1),
            c.int(2),
            c.zero(),
            c.from_f64(0.5),
            "",
        );
        assert!(at_most.pass && at_most.holds());
        let too_close = ClaimCheck::new(
            "x",
            "",
            Comparison::AtMost,
            c.int(1),
            c.int(2),
            c.zero(),
            c.int(2),
            "",
        );
        assert!(!too_close.pass);
        let within = ClaimCheck::new(
            "x",
            "",
            Comparison::Within,
            c.from_f64(1.1),
            c.int(1),
            c.from_f64(0.2),
            c.zero(),
            "",
        );
        assert!(within.pass);
        let above = ClaimCheck::new(
            "x",
            "",
            Comparison::Above,
            c.zero(),
            c.zero(),
            c.zero(),
            c.zero(),
            "",
        );
        assert!(!above.pass);
        let errored = ClaimCheck::errored("x", "", &MahlerError::Usage("u".into()));
        assert!(!errored.pass && !errored.holds());
    }

    #[test]
    fn sum_bound_on_degenerate_table() {
        let c = ctx();
        let t = build_table(6, &c).unwrap();
        let check = check_sum_bound(&t).unwrap();
        assert!(check.pass);
        assert!(check.detail.contains("k = 4"));
        let short = build_table(5, &c).unwrap();
        assert!(matches!(
            check_sum_bound(&short),
            Err(MahlerError::Range { .. })
        ));
    }

    #[test]
    fn ratio_schedule_rejects_k_one() {
        let c = ctx();
        let t = build_table(30, &c).unwrap();
        assert!(matches!(
            check_ratio_limit(&t, &[Band::at(1, 1.0)]),
            Err(MahlerError::Usage(_))
        ));
        assert!(matches!(
            check_abs_limit(&t, &[]),
            Err(MahlerError::Usage(_))
        ));
        let d = check_ratio_limit(&t, &[Band::at(2, 0.3)]).unwrap();
        assert!(d.pass);
        let dev = Float::with_val(c.prec(), &d.observed + 1u32).to_f64();
        assert!((dev - 0.269_237).abs() < 1e-5, "{dev}");
    }

    #[test]
    fn little_o_single_sample() {
        let c = ctx();
        let t = build_table(12, &c).unwrap();
        let checks = check_sum_little_o(&t, &[(10, 1e-5)], &[10]).unwrap();
        assert!(checks.iter().all(|ch| ch.pass), "{checks:?}");
        let checks = check_sum_little_o(&t, &[(10, 1e-7)], &[10]).unwrap();
        assert!(!checks[0].pass);
    }

    #[test]
    fn sign_flip_is_caught() {
        let c = ctx();
        let mut t = build_table(20, &c).unwrap();
        t.inject_sign_flip(3).unwrap();
        let checks = check_inequalities(
            &t,
            &c,
            &InequalityRanges {
                coefficients: 20,
                differences: 20,
            },
        )
        .unwrap();
        let sign = checks
            .iter()
            .find(|ch| ch.claim_id == ids::SIGN_PATTERN)
            .unwrap();
        assert!(!sign.pass);
        assert!(sign.detail.contains("k = 3"));
    }

    #[test]
    fn closed_form_grid_rejects_outside_points() {
        let c = ctx();
        let t = build_table(50, &c).unwrap();
        assert!(check_closed_forms(&t, &c, &[1.0], &[0.9, 0.99]).is_err());
    }
}
