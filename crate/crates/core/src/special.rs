//! Dirichlet eta and Riemann zeta at integer arguments, and the real Gamma
//! function on (0, 3].
//!
//! Eta is always evaluated through its complement
//! `1 - eta(k) = 2^-k - 3^-k + 4^-k - …`, which is an alternating series with
//! completely monotone terms. Summing the complement keeps full relative
//! precision even when `eta(k)` is within `2^-k` of 1, and lets `eta(k)` and
//! `zeta(k)` be returned with enough extra bits that they stay strictly
//! below (resp. above) 1.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{domain, MahlerError, Result};
use crate::precision::{HpReal, PrecisionContext};

/// Bits added on top of the working precision while summing.
const SUM_GUARD_BITS: u32 = 16;
/// Cap on the extra bits used to keep `eta(k)` distinguishable from 1.
const MAX_NEAR_ONE_BITS: u32 = 8192;

/// `log2(3 + sqrt(8))`: bits gained per term of the CVZ acceleration.
const CVZ_BITS_PER_TERM: f64 = 2.543_106_606_327_224;

/// How the complement series was summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaRoute {
    /// Cohen–Rodriguez Villegas–Zagier acceleration with `terms` terms.
    Accelerated { terms: usize },
    /// Plain truncated alternating sum with `terms` terms.
    Direct { terms: usize },
}

impl EtaRoute {
    pub fn terms(self) -> usize {
        match self {
            EtaRoute::Accelerated { terms } | EtaRoute::Direct { terms } => terms,
        }
    }
}

/// Picks the cheaper of the two summation routes for `1 - eta(k)` at `bits`
/// of relative precision.
pub fn eta_route(k: u32, bits: u32) -> EtaRoute {
    let target = f64::from(bits + SUM_GUARD_BITS);
    let accelerated = (target / CVZ_BITS_PER_TERM).ceil() as usize + 2;
    // Relative truncation error after N terms is at most ((N+2)/2)^-k * 9/5.
    let log2_ratio = (target + 1.0) / f64::from(k);
    let direct = if log2_ratio > 60.0 {
        usize::MAX
    } else {
        ((2.0 * log2_ratio.exp2()).ceil() as usize)
            .saturating_sub(2)
            .max(1)
    };
    if direct <= accelerated {
        EtaRoute::Direct { terms: direct }
    } else {
        EtaRoute::Accelerated { terms: accelerated }
    }
}

fn check_budget(route: EtaRoute, ctx: &PrecisionContext) -> Result<()> {
    if route.terms() > ctx.term_budget() {
        return Err(MahlerError::Resource(format!(
            "eta needs {} series terms, exceeding the term budget of {}",
            route.terms(),
            ctx.term_budget()
        )));
    }
    Ok(())
}

/// `(m + 2)^-k` at `prec` bits.
fn complement_term(m: usize, k: u32, prec: u32) -> Float {
    let base = u32::try_from(m + 2).expect("term index fits in u32");
    Float::with_val(prec, Float::u_pow_u(base, k)).recip()
}

fn complement_direct(k: u32, terms: usize, prec: u32) -> Float {
    let mut sum = Float::new(prec);
    for m in 0..terms {
        let term = complement_term(m, k, prec);
        if m % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    sum
}

fn complement_accelerated(k: u32, n: usize, prec: u32) -> Float {
    let prec = prec + 8;
    let mut d = Float::with_val(prec, 8).sqrt() + 3u32;
    d = d.pow(n as u32);
    d = (Float::with_val(prec, d.recip_ref()) + &d) / 2u32;
    let mut b = Float::with_val(prec, -1);
    let mut c = Float::with_val(prec, -&d);
    let mut sum = Float::new(prec);
    let n_i = n as i64;
    for j in 0..n {
        c = Float::with_val(prec, &b - &c);
        sum += Float::with_val(prec, &c * complement_term(j, k, prec));
        let j_i = j as i64;
        // b <- b (j+n)(j-n) / ((j + 1/2)(j + 1))
        b *= 2 * (j_i + n_i) * (j_i - n_i);
        b /= (2 * j_i + 1) * (j_i + 1);
    }
    sum / d
}

/// `1 - eta(k)` to full relative working precision, plus the route used.
pub fn eta_complement_with_route(k: u32, ctx: &PrecisionContext) -> Result<(HpReal, EtaRoute)> {
    if k < 2 {
        return Err(domain(format!("eta is only evaluated for k >= 2, got {k}")));
    }
    let route = eta_route(k, ctx.prec());
    check_budget(route, ctx)?;
    let work = ctx.prec() + SUM_GUARD_BITS;
    let sum = match route {
        EtaRoute::Direct { terms } => complement_direct(k, terms, work),
        EtaRoute::Accelerated { terms } => complement_accelerated(k, terms, work),
    };
    Ok((Float::with_val(ctx.prec(), sum), route))
}

/// `1 - eta(k) = sum_{n>=2} (-1)^n n^-k`, accurate to the working precision
/// relative to its own (small) magnitude.
pub fn eta_complement(k: u32, ctx: &PrecisionContext) -> Result<HpReal> {
    eta_complement_with_route(k, ctx).map(|(c, _)| c)
}

/// Precision that keeps a value `1 ± O(2^-k)` exact to the working precision.
pub(crate) fn near_one_prec(k: u32, ctx: &PrecisionContext) -> u32 {
    ctx.prec() + k.min(MAX_NEAR_ONE_BITS) + 8
}

pub(crate) fn eta_from_complement(k: u32, complement: &HpReal, ctx: &PrecisionContext) -> HpReal {
    let prec = near_one_prec(k, ctx);
    Float::with_val(prec, 1u32 - Float::with_val(prec, complement))
}

pub(crate) fn zeta_from_complement(k: u32, complement: &HpReal, ctx: &PrecisionContext) -> HpReal {
    // zeta(k) = 1 + (2^(1-k) - c) / (1 - 2^(1-k)) with c = 1 - eta(k).
    let prec = near_one_prec(k, ctx);
    let mut two_pow = Float::with_val(prec, 1u32);
    two_pow >>= k - 1;
    let numer = Float::with_val(prec, &two_pow - complement);
    let denom = Float::with_val(prec, 1u32 - &two_pow);
    Float::with_val(prec, numer / denom) + 1u32
}

/// Dirichlet eta `eta(k) = sum (-1)^(n+1) n^-k` for integer `k >= 2`.
///
/// The result carries `prec + k + 8` bits (capped) so it stays strictly below
/// 1 for every `k` the crate uses.
pub fn eta_int(k: u32, ctx: &PrecisionContext) -> Result<HpReal> {
    let c = eta_complement(k, ctx)?;
    Ok(eta_from_complement(k, &c, ctx))
}

/// Riemann zeta at integer `k >= 2`, via `eta(k) / (1 - 2^(1-k))`.
pub fn zeta_int(k: u32, ctx: &PrecisionContext) -> Result<HpReal> {
    if k < 2 {
        return Err(domain(format!("zeta has a pole at k = 1; got k = {k}")));
    }
    let c = eta_complement(k, ctx)?;
    Ok(zeta_from_complement(k, &c, ctx))
}

/// Spouge coefficients `c_0 … c_{a-1}` for a fixed decimal target.
#[derive(Debug)]
pub(crate) struct SpougeCoefficients {
    a: u32,
    prec: u32,
    coeffs: Vec<Float>,
}

impl SpougeCoefficients {
    /// Coefficients for a relative error below `10^-(digits + 2)`.
    ///
    /// The bound is `a^-1/2 (2 pi)^-(a + 1/2)` for `Re z > 0`. The partial
    /// fraction sum cancels heavily, so the coefficients are held with enough
    /// extra bits to cover the largest `|c_k|`.
    pub(crate) fn new(digits: u32) -> Self {
        let log10_two_pi = (2.0 * std::f64::consts::PI).log10();
        let a = (f64::from(digits + 2) / log10_two_pi).ceil() as u32 + 1;

        let mut ln_fact = 0.0_f64; // ln (k-1)!
        let mut max_ln = 0.0_f64;
        for k in 1..a {
            if k > 1 {
                ln_fact += f64::from(k - 1).ln();
            }
            let ln_c = (f64::from(k) - 0.5) * f64::from(a - k).ln() + f64::from(a - k) - ln_fact;
            max_ln = max_ln.max(ln_c);
        }
        let extra = (max_ln / std::f64::consts::LN_2).ceil().max(0.0) as u32;
        let base = (f64::from(digits + 2) * std::f64::consts::LOG2_10).ceil() as u32;
        let prec = base + extra + 32;

        let mut coeffs = Vec::with_capacity(a as usize);
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        coeffs.push(two_pi.sqrt());
        let mut fact = Integer::from(1); // (k-1)!
        for k in 1..a {
            if k > 1 {
                fact *= k - 1;
            }
            let dist = Float::with_val(prec, a - k);
            let exponent = Float::with_val(prec, f64::from(k) - 0.5);
            let power = Float::with_val(prec, dist.pow(&exponent));
            let growth = Float::with_val(prec, a - k).exp();
            let mut c = Float::with_val(prec, power * growth) / &fact;
            if k % 2 == 0 {
                c = -c;
            }
            coeffs.push(c);
        }
        Self { a, prec, coeffs }
    }

    /// `Gamma(z + 1)` for `z > 0`.
    fn gamma_shifted(&self, z: &Float) -> Float {
        let prec = self.prec;
        let z = Float::with_val(prec, z);
        let mut sum = self.coeffs[0].clone();
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let denom = Float::with_val(prec, &z + k as u32);
            sum += Float::with_val(prec, c / denom);
        }
        let za = Float::with_val(prec, &z + self.a);
        let half = Float::with_val(prec, &z + 0.5f64);
        let log_factor = Float::with_val(prec, za.ln_ref()) * half - za;
        log_factor.exp() * sum
    }
}

/// Real Gamma on `(0, 3]`.
pub fn gamma_real(x: &HpReal, ctx: &PrecisionContext) -> Result<HpReal> {
    if !x.is_finite() || *x <= 0 || *x > 3 {
        return Err(domain(format!(
            "gamma_real is defined on (0, 3]; got {}",
            x.to_f64()
        )));
    }
    let spouge = ctx.spouge();
    let value = if *x <= 1 {
        // Gamma(x) = Gamma(x + 1) / x keeps z = x inside Re z > 0.
        let g = spouge.gamma_shifted(x);
        g / Float::with_val(spouge.prec, x)
    } else {
        let z = Float::with_val(spouge.prec, x - 1u32);
        spouge.gamma_shifted(&z)
    };
    Ok(Float::with_val(ctx.prec(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::with_digits(d).unwrap()
    }

    fn close(a: &Float, b: &Float, tol: &Float) -> bool {
        Float::with_val(a.prec().max(b.prec()), a - b).abs() <= *tol
    }

    #[test]
    fn eta_two_is_pi_squared_over_twelve() {
        let c = ctx(40);
        let expected = Float::with_val(c.prec(), c.pi().square_ref()) / 12u32;
        assert!(close(&eta_int(2, &c).unwrap(), &expected, &c.pow10(-40)));
    }

    #[test]
    fn zeta_matches_mpfr() {
        let c = ctx(30);
        for k in [2u32, 3, 4, 5, 10, 17, 50, 120] {
            let ours = zeta_int(k, &c).unwrap();
            let mpfr = Float::with_val(c.prec() + 64, Float::with_val(c.prec() + 64, k).zeta());
            assert!(close(&ours, &mpfr, &c.pow10(-30)), "k = {k}");
        }
    }

    #[test]
    fn complement_keeps_relative_precision() {
        let c = ctx(30);
        let comp = eta_complement(200, &c).unwrap();
        // 1 - eta(200) = 2^-200 (1 - (2/3)^200 + …) ~ 2^-200 to ~35 digits.
        let mut two = Float::with_val(c.prec(), 1);
        two >>= 200;
        let rel = (Float::with_val(c.prec(), &comp - &two) / &two).abs();
        assert!(rel < c.pow10(-30));
        let eta = eta_int(200, &c).unwrap();
        assert!(eta < 1);
    }

    #[test]
    fn domain_errors() {
        let c = ctx(20);
        assert!(matches!(eta_int(1, &c), Err(MahlerError::Domain(_))));
        assert!(matches!(zeta_int(1, &c), Err(MahlerError::Domain(_))));
        assert!(gamma_real(&c.int(0), &c).is_err());
        assert!(gamma_real(&c.from_f64(3.0001), &c).is_err());
        assert!(gamma_real(&c.from_f64(-1.0), &c).is_err());
        assert!(gamma_real(&c.int(3), &c).is_ok());
    }

    #[test]
    fn term_budget_is_enforced() {
        let c = ctx(30).with_term_budget(5);
        match eta_int(2, &c) {
            Err(MahlerError::Resource(msg)) => assert!(msg.contains("budget of 5")),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn route_selection() {
        assert!(matches!(eta_route(2, 136), EtaRoute::Accelerated { .. }));
        assert!(matches!(eta_route(400, 136), EtaRoute::Direct { terms: 1 }));
        assert!(matches!(eta_route(100, 136), EtaRoute::Direct { .. }));
    }

    #[test]
    fn gamma_known_values() {
        let c = ctx(40);
        let tol = c.pow10(-40);
        assert!(close(&gamma_real(&c.int(1), &c).unwrap(), &c.int(1), &tol));
        assert!(close(&gamma_real(&c.int(3), &c).unwrap(), &c.int(2), &tol));
        let sqrt_pi = Float::with_val(c.prec(), c.pi().sqrt_ref());
        assert!(close(
            &gamma_real(&c.from_f64(0.5), &c).unwrap(),
            &sqrt_pi,
            &tol
        ));
        let half = Float::with_val(c.prec(), &sqrt_pi / 2u32);
        assert!(close(
            &gamma_real(&c.from_f64(1.5), &c).unwrap(),
            &half,
            &tol
        ));
    }

    #[test]
    fn gamma_matches_mpfr_on_grid() {
        let c = ctx(50);
        for i in 1..=60 {
            let x = c.from_f64(f64::from(i) * 0.05);
            let ours = gamma_real(&x, &c).unwrap();
            let reference = Float::with_val(c.prec() + 32, x.gamma_ref());
            let tol = Float::with_val(c.prec(), &reference * c.pow10(-50)).abs();
            assert!(close(&ours, &reference, &tol), "x = {}", x.to_f64());
        }
    }
}
