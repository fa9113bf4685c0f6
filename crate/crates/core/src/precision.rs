//! Working-precision configuration shared by every computation.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::special::SpougeCoefficients;

/// The arbitrary-precision real scalar used throughout the crate.
///
/// Values carry their own binary precision. Values produced by a
/// [`PrecisionContext`] use [`PrecisionContext::prec`] bits unless a
/// function documents otherwise (eta and zeta near 1 carry extra bits so that
/// `1 - eta(k)` stays representable).
pub type HpReal = Float;

pub const MIN_DIGITS: u32 = 15;
pub const MIN_GUARD_DIGITS: u32 = 10;
pub const DEFAULT_GUARD_DIGITS: u32 = 10;
/// Upper bound on series terms a single special-function evaluation may use.
pub const DEFAULT_TERM_BUDGET: usize = 200_000;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

struct Shared {
    prec: u32,
    pi: Float,
    ln2: Float,
    spouge: OnceLock<SpougeCoefficients>,
}

/// Decimal precision request plus the constants cached at that precision.
///
/// Cloning is cheap; clones share the cached constants. A context is
/// immutable once built and may be shared across threads.
#[derive(Clone)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
    term_budget: usize,
    exec: Exec,
    shared: Arc<Shared>,
}

impl PrecisionContext {
    pub fn new(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(domain(format!(
                "digits must be at least {MIN_DIGITS}, got {digits}"
            )));
        }
        if guard_digits < MIN_GUARD_DIGITS {
            return Err(domain(format!(
                "guard digits must be at least {MIN_GUARD_DIGITS}, got {guard_digits}"
            )));
        }
        let total = f64::from(digits + guard_digits);
        let prec = (total * BITS_PER_DIGIT).ceil() as u32 + 2;
        let shared = Shared {
            prec,
            pi: Float::with_val(prec, Constant::Pi),
            ln2: Float::with_val(prec, Constant::Log2),
            spouge: OnceLock::new(),
        };
        Ok(Self {
            digits,
            guard_digits,
            term_budget: DEFAULT_TERM_BUDGET,
            exec: Exec::default(),
            shared: Arc::new(shared),
        })
    }

    pub fn with_digits(digits: u32) -> Result<Self> {
        Self::new(digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_term_budget(mut self, budget: usize) -> Self {
        self.term_budget = budget;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn internal_digits(&self) -> u32 {
        self.digits + self.guard_digits
    }

    /// Internal binary precision in bits.
    pub fn prec(&self) -> u32 {
        self.shared.prec
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn term_budget(&self) -> usize {
        self.term_budget
    }

    pub fn pi(&self) -> &HpReal {
        &self.shared.pi
    }

    pub fn ln2(&self) -> &HpReal {
        &self.shared.ln2
    }

    pub fn inv_pi(&self) -> HpReal {
        Float::with_val(self.prec(), self.pi().recip_ref())
    }

    pub(crate) fn spouge(&self) -> &SpougeCoefficients {
        self.shared
            .spouge
            .get_or_init(|| SpougeCoefficients::new(self.internal_digits()))
    }

    pub fn zero(&self) -> HpReal {
        Float::new(self.prec())
    }

    pub fn int(&self, value: i64) -> HpReal {
        Float::with_val(self.prec(), value)
    }

    pub fn from_f64(&self, value: f64) -> HpReal {
        Float::with_val(self.prec(), value)
    }

    /// Parses a decimal literal, rounding once to the working precision.
    pub fn parse(&self, text: &str) -> Result<HpReal> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| domain(format!("cannot parse '{text}' as a real number: {e}")))?;
        Ok(Float::with_val(self.prec(), parsed))
    }

    /// `10^exponent` at working precision.
    pub fn pow10(&self, exponent: i32) -> HpReal {
        Float::with_val(self.prec(), 10).pow(exponent)
    }

    /// `2^-prec`, the relative rounding unit of one correctly rounded operation.
    pub fn unit_roundoff(&self) -> HpReal {
        let mut u = Float::with_val(self.prec(), 1);
        u >>= self.prec();
        u
    }

    /// Decimal scientific notation with exactly `digits` significant figures.
    pub fn format(&self, value: &HpReal) -> String {
        format_sci(value, self.digits)
    }
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("digits", &self.digits)
            .field("guard_digits", &self.guard_digits)
            .field("prec_bits", &self.prec())
            .field("term_budget", &self.term_budget)
            .field("exec", &self.exec)
            .finish()
    }
}

/// Formats `value` as `d.ddd…e±x` with `significant` significant figures.
pub fn format_sci(value: &HpReal, significant: u32) -> String {
    let digits = significant.max(1) as usize;
    if value.is_zero() {
        return format!("{:.*e}", digits - 1, 0.0_f64);
    }
    // rug reads the precision field as the number of significant digits.
    format!("{:.*e}", digits, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(14, 10).is_err());
        assert!(PrecisionContext::new(15, 9).is_err());
        assert!(PrecisionContext::new(15, 10).is_ok());
    }

    #[test]
    fn pi_matches_machin_formula() {
        // pi = 16 atan(1/5) - 4 atan(1/239), summed independently of the cache.
        let ctx = PrecisionContext::with_digits(60).unwrap();
        let prec = ctx.prec() + 20;
        let atan_inv = |n: u32| {
            let x = Float::with_val(prec, n).recip();
            let x2 = Float::with_val(prec, &x * &x);
            let mut power = x.clone();
            let mut sum = Float::new(prec);
            let mut k = 0u32;
            loop {
                let term = Float::with_val(prec, &power / (2 * k + 1));
                if term.is_zero() || term.get_exp().unwrap_or(0) < -(prec as i32) - 4 {
                    break;
                }
                if k % 2 == 0 {
                    sum += &term;
                } else {
                    sum -= &term;
                }
                power *= &x2;
                k += 1;
            }
            sum
        };
        let machin = Float::with_val(prec, 16 * atan_inv(5) - 4 * atan_inv(239));
        let diff = Float::with_val(prec, &machin - ctx.pi()).abs();
        assert!(diff < ctx.pow10(-(ctx.digits() as i32)));
    }

    #[test]
    fn format_has_requested_significant_figures() {
        let ctx = PrecisionContext::with_digits(20).unwrap();
        let s = ctx.format(ctx.pi());
        assert_eq!(s, "3.1415926535897932385e0");
        let back = ctx.parse(&s).unwrap();
        let diff = Float::with_val(ctx.prec(), &back - ctx.pi()).abs();
        assert!(diff < ctx.pow10(-19));
        assert_eq!(ctx.format(&ctx.zero()), "0.0000000000000000000e0");
    }

    #[test]
    fn parse_rejects_garbage() {
        let ctx = PrecisionContext::with_digits(20).unwrap();
        assert!(ctx.parse("abc").is_err());
        assert_eq!(ctx.parse("0.5").unwrap(), 0.5);
    }
}
