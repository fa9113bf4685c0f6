//! Tanh-sinh (double exponential) quadrature at arbitrary precision.
//!
//! `x = c + h tanh(pi/2 sinh t)` pushes the nodes double-exponentially close
//! to the endpoints, so integrable endpoint singularities such as `log^k x`
//! or `x^-1/2` converge at nearly the same rate as smooth integrands. The
//! integrand receives each node's distance to both endpoints computed
//! directly from the transform, never as `x - a`, so nodes within `1e-1000`
//! of an endpoint are still resolved.

use rug::Float;

use crate::error::{domain, MahlerError, Result};
use crate::precision::{HpReal, PrecisionContext};

/// Levels evaluated before the inter-level difference is trusted.
pub const MIN_LEVEL: u32 = 3;
pub const DEFAULT_MAX_LEVEL: u32 = 12;
/// Upper limit on `|t|`; beyond it the endpoint distance is below `e^-12000`.
const T_CAP: i64 = 9;

/// A quadrature node: its abscissa and its distances to both endpoints.
#[derive(Debug, Clone)]
pub struct Abscissa {
    pub x: HpReal,
    /// `x - a`, computed without cancellation.
    pub from_a: HpReal,
    /// `b - x`, computed without cancellation.
    pub to_b: HpReal,
}

#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: HpReal,
    /// Last inter-level difference, floored at the accumulated rounding error.
    pub error_estimate: HpReal,
    /// Refinement level at termination (step `2^-levels`).
    pub levels: u32,
    /// Total integrand evaluations.
    pub nodes: usize,
}

struct Panel {
    a: HpReal,
    b: HpReal,
    half: HpReal,
    width: HpReal,
    half_pi: HpReal,
    prec: u32,
}

impl Panel {
    /// Node and weight at `t = j / 2^level`.
    fn node(&self, j: i64, level: u32) -> (Abscissa, HpReal) {
        let prec = self.prec;
        let mut t = Float::with_val(prec, j);
        t >>= level;
        let (sinh, cosh) = t.clone().sinh_cosh(Float::new(prec));
        let u = Float::with_val(prec, &self.half_pi * sinh.abs());
        let q = Float::with_val(prec, -2 * u).exp();
        let one_q = Float::with_val(prec, 1u32 + &q);
        let near = Float::with_val(prec, &self.width * &q) / &one_q;
        let far = Float::with_val(prec, &self.width - &near);
        let abscissa = if j >= 0 {
            Abscissa {
                x: Float::with_val(prec, &self.b - &near),
                from_a: far,
                to_b: near,
            }
        } else {
            Abscissa {
                x: Float::with_val(prec, &self.a + &near),
                from_a: near,
                to_b: far,
            }
        };
        // w = half * (pi/2) cosh t / cosh^2 u = half * (pi/2) cosh t * 4q / (1+q)^2
        let weight =
            Float::with_val(prec, &self.half * &self.half_pi) * cosh * q * 4u32 / one_q.square();
        (abscissa, weight)
    }
}

fn evaluate<F>(panel: &Panel, f: &F, j: i64, level: u32) -> Result<HpReal>
where
    F: Fn(&Abscissa) -> HpReal + Sync,
{
    let (node, weight) = panel.node(j, level);
    let value = f(&node);
    if !value.is_finite() {
        return Err(MahlerError::Integrand {
            abscissa: format!("{:.20e}", node.x),
        });
    }
    Ok(weight * value)
}

/// Integrates `f` over `[a, b]`, halving the step until two successive levels
/// differ by at most `tol` (after at least [`MIN_LEVEL`] levels) or
/// `max_level` is reached.
///
/// The `t` range is fixed at level 0: each side is extended one unit step at
/// a time until two consecutive terms fall below `2^-prec` of the running
/// sum.
pub fn tanh_sinh<F>(
    f: F,
    a: &HpReal,
    b: &HpReal,
    tol: &HpReal,
    max_level: u32,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult>
where
    F: Fn(&Abscissa) -> HpReal + Sync,
{
    if !(a < b) {
        return Err(domain("tanh_sinh needs a < b"));
    }
    if !(*tol > 0) {
        return Err(domain("tolerance must be positive"));
    }
    let prec = ctx.prec() + 16;
    let half_pi = Float::with_val(prec, ctx.pi()) / 2u32;
    let width = Float::with_val(prec, b - a);
    let panel = Panel {
        a: Float::with_val(prec, a),
        b: Float::with_val(prec, b),
        half: Float::with_val(prec, &width / 2u32),
        width,
        half_pi,
        prec,
    };
    let mut negligible = Float::with_val(prec, 1);
    negligible >>= ctx.prec() + 8;

    let mut sum = Float::new(prec);
    let mut abs_sum = Float::new(prec);
    let mut nodes = 0usize;

    // Level 0 and the extent of the t range on each side.
    let centre = evaluate(&panel, &f, 0, 0)?;
    sum += &centre;
    abs_sum += centre.abs();
    nodes += 1;
    let mut extents = [0i64; 2];
    for (side, sign) in [(0usize, 1i64), (1, -1)] {
        let mut quiet = 0;
        let mut j = 1;
        while j <= T_CAP {
            let term = evaluate(&panel, &f, sign * j, 0)?;
            nodes += 1;
            let small = Float::with_val(prec, term.abs_ref())
                <= Float::with_val(prec, &sum * &negligible).abs();
            sum += &term;
            abs_sum += term.abs();
            extents[side] = j;
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 2 {
                break;
            }
            j += 1;
        }
    }
    let (right, left) = (extents[0], extents[1]);

    let mut previous = Float::with_val(prec, &sum);
    let mut difference = Float::with_val(prec, f64::INFINITY);
    let mut level = 0u32;
    let exec = ctx.exec();
    while level < max_level {
        level += 1;
        let scale = 1i64 << level;
        let indices: Vec<i64> = (-left * scale..=right * scale)
            .filter(|j| j % 2 != 0)
            .collect();
        let terms = exec.map(&indices, |&j| evaluate(&panel, &f, j, level));
        for term in terms {
            let term = term?;
            sum += &term;
            abs_sum += term.abs();
        }
        nodes += indices.len();
        let mut estimate = Float::with_val(prec, &sum);
        estimate >>= level;
        difference = Float::with_val(prec, &estimate - &previous).abs();
        previous = estimate;
        if level >= MIN_LEVEL && difference <= *tol {
            break;
        }
    }

    let mut rounding = Float::with_val(prec, &abs_sum * nodes as u64) * ctx.unit_roundoff();
    rounding >>= level;
    let error_estimate = Float::with_val(
        ctx.prec(),
        if rounding > difference {
            rounding
        } else {
            difference
        },
    );
    let value = Float::with_val(ctx.prec(), previous);
    if error_estimate > *tol {
        return Err(MahlerError::Convergence {
            best: format!("{:.20e}", value),
            estimate: format!("{:.3e}", error_estimate),
            tol: format!("{:.3e}", tol),
            levels: level,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        levels: level,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(30).unwrap()
    }

    #[test]
    fn constant_integrand() {
        let c = ctx();
        let r = tanh_sinh(|_| c.int(1), &c.zero(), &c.int(1), &c.pow10(-25), 12, &c).unwrap();
        assert!((r.value.to_f64() - 1.0).abs() < 1e-25);
        assert!(r.nodes > 0);
    }

    #[test]
    fn endpoint_singular_power() {
        let c = ctx();
        let tol = c.pow10(-10);
        let r = tanh_sinh(
            |n| Float::with_val(c.prec(), n.from_a.recip_sqrt_ref()),
            &c.zero(),
            &c.int(1),
            &tol,
            12,
            &c,
        )
        .unwrap();
        let err = Float::with_val(c.prec(), &r.value - 2u32).abs();
        assert!(
            err <= r.error_estimate,
            "error {err} vs estimate {}",
            r.error_estimate
        );
    }

    #[test]
    fn distances_are_consistent() {
        let c = ctx();
        let panel = Panel {
            a: c.from_f64(0.25),
            b: c.int(1),
            half: c.from_f64(0.375),
            width: c.from_f64(0.75),
            half_pi: Float::with_val(c.prec(), c.pi()) / 2u32,
            prec: c.prec(),
        };
        for j in [-40i64, -3, 0, 5, 33] {
            let (n, w) = panel.node(j, 2);
            let sum = Float::with_val(c.prec(), &n.from_a + &n.to_b);
            assert!((sum.to_f64() - 0.75).abs() < 1e-30);
            assert!(n.from_a > 0 && n.to_b > 0 && w > 0);
        }
    }

    #[test]
    fn bad_interval_and_nonfinite_integrand() {
        let c = ctx();
        assert!(tanh_sinh(|_| c.int(1), &c.int(1), &c.int(1), &c.pow10(-5), 5, &c).is_err());
        assert!(tanh_sinh(|_| c.int(1), &c.zero(), &c.int(1), &c.zero(), 5, &c).is_err());
        let r = tanh_sinh(
            |n| Float::with_val(c.prec(), n.x.recip_ref()),
            &c.from_f64(-1.0),
            &c.int(1),
            &c.pow10(-5),
            5,
            &c,
        );
        assert!(matches!(r, Err(MahlerError::Integrand { .. })));
    }

    #[test]
    fn reports_non_convergence() {
        let c = ctx();
        // A tolerance below the working precision can never be certified.
        let r = tanh_sinh(
            |n| Float::with_val(c.prec(), n.x.exp_ref()),
            &c.zero(),
            &c.int(1),
            &c.pow10(-60),
            4,
            &c,
        );
        assert!(matches!(r, Err(MahlerError::Convergence { levels: 4, .. })));
    }
}
