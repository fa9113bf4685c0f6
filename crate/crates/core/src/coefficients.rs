//! Taylor coefficients `a_k = m_k / k!` of the zeta Mahler measure of
//! `x - r`, `|r| = 1`, and the generating function `Z(s)`.
//!
//! With `b_k = (-1)^(k+1) (1 - 2^-k) zeta(k+1) = (-1)^(k+1) eta(k+1)`:
//!
//! ```text
//! a_0 = 1,  a_1 = 0,  a_2 = zeta(2)/4,
//! a_k = (1/k) sum_{j=0}^{k-2} a_j b_{k-1-j}        (k >= 3)
//! ```
//!
//! Every term of that sum has sign `(-1)^k`, so the recurrence never cancels.
//! `|a_k|` is computed a second time from the all-positive recurrence
//! `A_k = (1/k) sum A_j B_{k-1-j}` with `B_k = eta(k+1)`.

use rug::ops::Pow;
use rug::{Assign, Float, Integer};

use crate::error::{domain, MahlerError, Result};
use crate::precision::{HpReal, PrecisionContext};
use crate::special::{eta_complement, eta_from_complement, zeta_from_complement};

/// Bits carried by the recurrence accumulators beyond the working precision.
const ACC_GUARD_BITS: u32 = 8;

fn k_u32(k: usize) -> Result<u32> {
    u32::try_from(k).map_err(|_| domain(format!("index {k} is too large")))
}

/// `(-1)^(k+1) (1 - 2^-k) zeta(k+1)` rounded to working precision.
fn b_from_zeta(k: usize, zeta_next: &HpReal, ctx: &PrecisionContext) -> HpReal {
    let prec = zeta_next.prec();
    let mut two_pow = Float::with_val(prec, 1u32);
    two_pow >>= k as u32;
    let factor = Float::with_val(prec, 1u32 - two_pow);
    let magnitude = Float::with_val(ctx.prec(), factor * zeta_next);
    if k % 2 == 1 {
        magnitude
    } else {
        -magnitude
    }
}

/// The recurrence kernel `b_k = (-1)^(k+1) (1 - 2^-k) zeta(k+1)`, `k >= 1`.
pub fn b_coeff(k: usize, ctx: &PrecisionContext) -> Result<HpReal> {
    if k < 1 {
        return Err(domain(format!("b_k is defined for k >= 1, got {k}")));
    }
    let m = k_u32(k + 1)?;
    let c = eta_complement(m, ctx)?;
    Ok(b_from_zeta(k, &zeta_from_complement(m, &c, ctx), ctx))
}

/// Coefficient arrays for `k = 0..=max_k`, immutable once built.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    max_k: usize,
    /// `b[k]` for `k = 1..=max_k`; `b[0]` is an unused zero.
    b: Vec<HpReal>,
    /// `B_k = eta(k+1)`, same indexing as `b`, held with extra bits.
    eta_shifted: Vec<HpReal>,
    a: Vec<HpReal>,
    abs_a: Vec<HpReal>,
    m: Vec<HpReal>,
    ctx: PrecisionContext,
}

impl CoefficientTable {
    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.max_k {
            Err(MahlerError::Range {
                index: k,
                max: self.max_k,
            })
        } else {
            Ok(())
        }
    }

    /// `a_0 … a_max_k` from the signed recurrence.
    pub fn a_values(&self) -> &[HpReal] {
        &self.a
    }

    /// `A_0 … A_max_k` from the all-positive recurrence.
    pub fn abs_values(&self) -> &[HpReal] {
        &self.abs_a
    }

    /// `m_0 … m_max_k`, `m_k = k! a_k`.
    pub fn m_values(&self) -> &[HpReal] {
        &self.m
    }

    pub fn a(&self, k: usize) -> Result<&HpReal> {
        self.check(k)?;
        Ok(&self.a[k])
    }

    pub fn b(&self, k: usize) -> Result<&HpReal> {
        self.check(k)?;
        if k == 0 {
            return Err(domain("b_k is defined for k >= 1"));
        }
        Ok(&self.b[k])
    }

    /// `B_k = |b_k| = eta(k+1)`.
    pub fn eta_shifted(&self, k: usize) -> Result<&HpReal> {
        self.check(k)?;
        if k == 0 {
            return Err(domain("B_k is defined for k >= 1"));
        }
        Ok(&self.eta_shifted[k])
    }

    /// Upper bound on the absolute rounding error of the stored `a_k`.
    ///
    /// Each `a_k` is a same-signed sum, so its relative error is at most the
    /// worst relative error of its inputs plus `k + 2` roundings; summed over
    /// the recurrence this stays below `(k^2 + 10k + 10) u`.
    pub fn a_error_bound(&self, k: usize) -> HpReal {
        let k = k as u64;
        let factor = k * k + 10 * k + 10;
        let abs = Float::with_val(self.ctx.prec(), self.a[k as usize].abs_ref());
        abs * self.ctx.unit_roundoff() * factor
    }

    /// Flips the sign of `a_k` and `m_k` after construction. Used to exercise
    /// the failure paths of the verifier.
    #[doc(hidden)]
    pub fn inject_sign_flip(&mut self, k: usize) -> Result<()> {
        self.check(k)?;
        self.a[k] = Float::with_val(self.ctx.prec(), -&self.a[k]);
        self.m[k] = Float::with_val(self.ctx.prec(), -&self.m[k]);
        Ok(())
    }
}

fn signed_recurrence(
    max_k: usize,
    b: &[HpReal],
    zeta2: &HpReal,
    ctx: &PrecisionContext,
) -> Result<Vec<HpReal>> {
    let prec = ctx.prec();
    let mut a = Vec::with_capacity(max_k + 1);
    a.push(Float::with_val(prec, 1));
    a.push(Float::new(prec));
    a.push(Float::with_val(prec, zeta2 / 4u32));
    let mut acc = Float::new(prec + ACC_GUARD_BITS);
    for k in 3..=max_k {
        acc.assign(0u32);
        for j in 0..=k - 2 {
            acc += &a[j] * &b[k - 1 - j];
        }
        let value = Float::with_val(prec, &acc / k as u32);
        let expected_positive = k % 2 == 0;
        if value.is_zero() || (value > 0) != expected_positive {
            return Err(MahlerError::Integrity {
                k,
                message: format!(
                    "a_k has sign {} but (-1)^k requires {}",
                    if value > 0 { "+" } else { "-" },
                    if expected_positive { "+" } else { "-" }
                ),
            });
        }
        a.push(value);
    }
    Ok(a)
}

fn positive_recurrence(
    max_k: usize,
    eta_shifted: &[HpReal],
    ctx: &PrecisionContext,
) -> Vec<HpReal> {
    let prec = ctx.prec();
    let mut abs = Vec::with_capacity(max_k + 1);
    abs.push(Float::with_val(prec, 1));
    abs.push(Float::new(prec));
    let mut acc = Float::new(prec + ACC_GUARD_BITS);
    for k in 2..=max_k {
        acc.assign(0u32);
        for j in 0..=k - 2 {
            acc += &abs[j] * &eta_shifted[k - 1 - j];
        }
        abs.push(Float::with_val(prec, &acc / k as u32));
    }
    abs
}

/// Builds `b`, `B`, `a`, `A` and `m` for `k = 0..=max_k`.
///
/// Eta values are evaluated in parallel (per [`PrecisionContext::exec`]); the
/// two recurrences are inherently sequential and run concurrently with each
/// other.
pub fn build_table(max_k: usize, ctx: &PrecisionContext) -> Result<CoefficientTable> {
    if max_k < 2 {
        return Err(domain(format!(
            "coefficient table needs max_k >= 2, got {max_k}"
        )));
    }
    let top = k_u32(max_k + 1)?;
    // complements[i] = 1 - eta(i + 2)
    let complements: Vec<HpReal> = ctx
        .exec()
        .map_range(2..top as usize + 1, |m| eta_complement(m as u32, ctx))
        .into_iter()
        .collect::<Result<_>>()?;
    let complement = |m: usize| &complements[m - 2];

    let mut b = vec![Float::new(ctx.prec())];
    let mut eta_shifted = vec![Float::new(ctx.prec())];
    for k in 1..=max_k {
        let m = k as u32 + 1;
        eta_shifted.push(eta_from_complement(m, complement(k + 1), ctx));
        b.push(b_from_zeta(
            k,
            &zeta_from_complement(m, complement(k + 1), ctx),
            ctx,
        ));
    }
    let zeta2 = zeta_from_complement(2, complement(2), ctx);

    let (a, abs_a) = ctx.exec().join(
        || signed_recurrence(max_k, &b, &zeta2, ctx),
        || positive_recurrence(max_k, &eta_shifted, ctx),
    );
    let a = a?;

    let mut m = Vec::with_capacity(max_k + 1);
    let mut factorial = Integer::from(1);
    for (k, ak) in a.iter().enumerate() {
        if k > 1 {
            factorial *= k as u32;
        }
        m.push(Float::with_val(ctx.prec(), ak * &factorial));
    }

    Ok(CoefficientTable {
        max_k,
        b,
        eta_shifted,
        a,
        abs_a,
        m,
        ctx: ctx.clone(),
    })
}

/// `m_k = k! a_k` from a built table.
pub fn higher_mahler(k: usize, table: &CoefficientTable) -> Result<HpReal> {
    table.check(k)?;
    Ok(table.m[k].clone())
}

/// A truncated evaluation together with a certified bound on what was cut off.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: HpReal,
    pub tail_bound: HpReal,
}

fn check_unit_disc(s: &HpReal) -> Result<()> {
    if !s.is_finite() || s.clone().abs() >= 1 {
        return Err(domain(format!(
            "the generating function is evaluated for |s| < 1; got s = {}",
            s.to_f64()
        )));
    }
    Ok(())
}

/// `|s|^(K+1) / (1 - |s|)`: tail of `sum a_k s^k` past `K` using `|a_k| <= 1`.
pub fn series_tail_bound(s: &HpReal, max_k: usize, ctx: &PrecisionContext) -> HpReal {
    let abs = Float::with_val(ctx.prec(), s.abs_ref());
    let power = Float::with_val(ctx.prec(), (&abs).pow(max_k as u32 + 1));
    power / (1u32 - abs)
}

/// Smallest `K` whose series tail bound at `s` is below `tail_tol`.
pub fn terms_needed(s: &HpReal, tail_tol: &HpReal, ctx: &PrecisionContext) -> usize {
    let abs = Float::with_val(ctx.prec(), s.abs_ref());
    if abs.is_zero() {
        return 0;
    }
    let one_minus = Float::with_val(ctx.prec(), 1u32 - &abs);
    let target = Float::with_val(ctx.prec(), tail_tol * one_minus).ln();
    let ratio = (target / abs.ln()).to_f64();
    (ratio.ceil() as i64 - 1).max(0) as usize
}

/// `sum_{k=0}^{K} a_k s^k` with `K = table.max_k()`.
pub fn z_series_eval(
    s: &HpReal,
    table: &CoefficientTable,
    tail_tol: &HpReal,
) -> Result<SeriesValue> {
    check_unit_disc(s)?;
    let ctx = &table.ctx;
    let tail_bound = series_tail_bound(s, table.max_k, ctx);
    if tail_bound > *tail_tol {
        return Err(MahlerError::Resource(format!(
            "table with max_k = {} leaves a tail bound of {:.3e} at s = {}; max_k >= {} is needed",
            table.max_k,
            tail_bound.to_f64(),
            s.to_f64(),
            terms_needed(s, tail_tol, ctx)
        )));
    }
    let mut value = Float::new(ctx.prec() + ACC_GUARD_BITS);
    for ak in table.a.iter().rev() {
        value *= s;
        value += ak;
    }
    Ok(SeriesValue {
        value: Float::with_val(ctx.prec(), value),
        tail_bound,
    })
}

/// `exp(sum_{k=2}^{K} (-1)^k eta(k)/k s^k)`, never touching the `a_k`.
///
/// The exponent's tail is at most `delta = |s|^(K+1) / ((K+1)(1 - |s|))`, so
/// the reported bound is `value * (e^delta - 1)`.
pub fn z_exp_eval(s: &HpReal, max_k: usize, ctx: &PrecisionContext) -> Result<SeriesValue> {
    check_unit_disc(s)?;
    let max_k = max_k.max(1);
    let top = k_u32(max_k)?;
    let prec = ctx.prec() + ACC_GUARD_BITS;
    let etas: Vec<HpReal> = ctx
        .exec()
        .map_range(2..top as usize + 1, |k| {
            eta_complement(k as u32, ctx).map(|c| eta_from_complement(k as u32, &c, ctx))
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut exponent = Float::new(prec);
    let mut power = Float::with_val(prec, s);
    for (i, eta) in etas.iter().enumerate() {
        let k = i as u32 + 2;
        power *= s;
        let term = Float::with_val(prec, eta * &power) / k;
        if k.is_multiple_of(2) {
            exponent += term;
        } else {
            exponent -= term;
        }
    }
    let value = Float::with_val(ctx.prec(), exponent.exp());

    let abs = Float::with_val(ctx.prec(), s.abs_ref());
    let delta = Float::with_val(ctx.prec(), (&abs).pow(max_k as u32 + 1))
        / (Float::with_val(ctx.prec(), 1u32 - abs) * (max_k as u32 + 1));
    let tail_bound = Float::with_val(ctx.prec(), &value * delta.exp_m1());
    Ok(SeriesValue { value, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(30).unwrap()
    }

    fn near(a: &HpReal, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn b_signs_alternate() {
        let c = ctx();
        for k in 1..=10 {
            let b = b_coeff(k, &c).unwrap();
            assert_eq!(b > 0, k % 2 == 1, "k = {k}");
        }
        assert!(b_coeff(0, &c).is_err());
        assert!(near(
            &b_coeff(1, &c).unwrap(),
            0.822_467_033_424_113_2,
            1e-15
        ));
        assert!(near(
            &b_coeff(2, &c).unwrap(),
            -0.901_542_677_369_695_7,
            1e-15
        ));
    }

    #[test]
    fn small_table_values() {
        let c = ctx();
        let t = build_table(4, &c).unwrap();
        assert_eq!(t.a(0).unwrap(), &1);
        assert!(t.a(1).unwrap().is_zero());
        assert!(near(t.a(2).unwrap(), 0.411_233_516_712_056_6, 1e-15));
        // a_3 = b_2 / 3 = -zeta(3)/4
        assert!(near(t.a(3).unwrap(), -0.300_514_225_789_898_6, 1e-15));
        assert!(near(t.a(4).unwrap(), 0.321_314_710_008, 1e-12));
        assert!(matches!(
            t.a(5),
            Err(MahlerError::Range { index: 5, max: 4 })
        ));
    }

    #[test]
    fn rejects_short_tables() {
        assert!(matches!(
            build_table(1, &ctx()),
            Err(MahlerError::Domain(_))
        ));
        assert!(build_table(2, &ctx()).is_ok());
    }

    #[test]
    fn m_uses_factorial() {
        let c = ctx();
        let t = build_table(6, &c).unwrap();
        assert!(higher_mahler(0, &t).unwrap() == 1);
        assert!(higher_mahler(1, &t).unwrap().is_zero());
        assert!(near(
            &higher_mahler(2, &t).unwrap(),
            0.822_467_033_424_113_2,
            1e-15
        ));
        assert!(near(
            &higher_mahler(3, &t).unwrap(),
            -1.803_085_354_739_391_4,
            1e-14
        ));
        assert!(higher_mahler(7, &t).is_err());
    }

    #[test]
    fn series_rejects_outside_disc_and_short_tables() {
        let c = ctx();
        let t = build_table(20, &c).unwrap();
        let tol = c.pow10(-25);
        assert!(matches!(
            z_series_eval(&c.int(1), &t, &tol),
            Err(MahlerError::Domain(_))
        ));
        match z_series_eval(&c.from_f64(0.5), &t, &tol) {
            Err(MahlerError::Resource(msg)) => assert!(msg.contains("max_k >= 84"), "{msg}"),
            other => panic!("expected resource error, got {other:?}"),
        }
        assert_eq!(z_series_eval(&c.zero(), &t, &tol).unwrap().value, 1);
    }

    #[test]
    fn exp_route_at_zero() {
        let c = ctx();
        let z = z_exp_eval(&c.zero(), 50, &c).unwrap();
        assert_eq!(z.value, 1);
        assert!(z.tail_bound.is_zero());
        assert!(z_exp_eval(&c.from_f64(-1.0), 50, &c).is_err());
    }

    #[test]
    fn fault_injection_flips_sign() {
        let c = ctx();
        let mut t = build_table(5, &c).unwrap();
        t.inject_sign_flip(3).unwrap();
        assert!(*t.a(3).unwrap() > 0);
        assert!(t.m_values()[3] > 0);
    }
}
