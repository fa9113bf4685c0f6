//! Direct quadrature of `m_k` and `Z(s)` over the unit circle.
//!
//! `|e^{2 pi i t} - e^{2 pi i phi}| = 2 |sin(pi (t - phi))|`, so the integrand
//! has a single logarithmic singularity at `t = phi`. The circle is cut
//! there: `[0, phi]` and `[phi, 1]` each carry the singularity at one
//! endpoint, where the tanh-sinh transform handles it. For `phi = 0` the
//! integral is folded onto `[0, 1/2]` using the symmetry of `sin`.

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, MahlerError, Result};
use crate::precision::{HpReal, PrecisionContext};
use crate::quadrature::{tanh_sinh, Abscissa, QuadratureResult, DEFAULT_MAX_LEVEL};

/// A root `r = e^{2 pi i angle}` of `x - r`, with `angle` reduced to `[0, 1)`.
#[derive(Debug, Clone)]
pub struct UnitCirclePoint {
    angle: HpReal,
}

impl UnitCirclePoint {
    pub fn new(angle: &HpReal) -> Result<Self> {
        if !angle.is_finite() {
            return Err(domain("angle must be finite"));
        }
        let floor = Float::with_val(angle.prec(), angle.floor_ref());
        Ok(Self {
            angle: Float::with_val(angle.prec(), angle - floor),
        })
    }

    pub fn from_f64(angle: f64, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(&ctx.from_f64(angle))
    }

    /// `r = 1`.
    pub fn one(ctx: &PrecisionContext) -> Self {
        Self { angle: ctx.zero() }
    }

    pub fn angle(&self) -> &HpReal {
        &self.angle
    }
}

/// `ln(2 sin(pi u))` using whichever of `u`, `1 - u` is smaller.
fn log_chord(u: &Float, complement: &Float) -> Float {
    let prec = u.prec().max(complement.prec());
    let arg = if u <= complement { u } else { complement };
    let mut sine = Float::with_val(prec, arg).sin_pi();
    sine *= 2u32;
    sine.ln()
}

fn trivial(ctx: &PrecisionContext) -> QuadratureResult {
    QuadratureResult {
        value: ctx.int(1),
        error_estimate: ctx.zero(),
        levels: 0,
        nodes: 1,
    }
}

/// Integrates `g(ln |e^{2 pi i t} - r|)` over `t in [0, 1]`.
fn circle_integral<G>(
    g: G,
    point: &UnitCirclePoint,
    tol: &HpReal,
    max_level: u32,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult>
where
    G: Fn(&Float) -> Float + Sync,
{
    if !(*tol > 0) {
        return Err(domain("tolerance must be positive"));
    }
    let prec = ctx.prec() + 16;
    let half_tol = Float::with_val(prec, tol / 2u32);
    let phi = Float::with_val(prec, point.angle());

    if phi.is_zero() {
        let half = Float::with_val(prec, 0.5f64);
        let r = tanh_sinh(
            |n: &Abscissa| g(&log_chord(&n.from_a, &n.x)),
            &ctx.zero(),
            &half,
            &half_tol,
            max_level,
            ctx,
        )?;
        return Ok(QuadratureResult {
            value: r.value * 2u32,
            error_estimate: r.error_estimate * 2u32,
            levels: r.levels,
            nodes: r.nodes,
        });
    }

    let one_minus_phi = Float::with_val(prec, 1u32 - &phi);
    let (before, after) = ctx.exec().join(
        || {
            // t in [0, phi]: u = phi - t, 1 - u = (1 - phi) + t
            tanh_sinh(
                |n: &Abscissa| {
                    let other = Float::with_val(prec, &one_minus_phi + &n.from_a);
                    g(&log_chord(&n.to_b, &other))
                },
                &ctx.zero(),
                &phi,
                &half_tol,
                max_level,
                ctx,
            )
        },
        || {
            // t in [phi, 1]: u = t - phi, 1 - u = phi + (1 - t)
            tanh_sinh(
                |n: &Abscissa| {
                    let other = Float::with_val(prec, &phi + &n.to_b);
                    g(&log_chord(&n.from_a, &other))
                },
                &phi,
                &Float::with_val(prec, 1u32),
                &half_tol,
                max_level,
                ctx,
            )
        },
    );
    let (before, after) = (before?, after?);
    Ok(QuadratureResult {
        value: Float::with_val(ctx.prec(), &before.value + &after.value),
        error_estimate: Float::with_val(ctx.prec(), &before.error_estimate + &after.error_estimate),
        levels: before.levels.max(after.levels),
        nodes: before.nodes + after.nodes,
    })
}

/// `m_k = int_0^1 log^k |e^{2 pi i t} - r| dt` with the default level cap.
pub fn mahler_integral(
    k: u32,
    point: &UnitCirclePoint,
    tol: &HpReal,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult> {
    mahler_integral_with_levels(k, point, tol, DEFAULT_MAX_LEVEL, ctx)
}

pub fn mahler_integral_with_levels(
    k: u32,
    point: &UnitCirclePoint,
    tol: &HpReal,
    max_level: u32,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult> {
    if !(*tol > 0) {
        return Err(domain("tolerance must be positive"));
    }
    if k == 0 {
        return Ok(trivial(ctx));
    }
    let prec = ctx.prec() + 16;
    let result = circle_integral(
        |log_value| Float::with_val(prec, log_value.pow(k)),
        point,
        tol,
        max_level,
        ctx,
    );
    match result {
        Err(MahlerError::Integrand { abscissa }) => Err(MahlerError::Resource(format!(
            "log^{k} left the representable range near t = {abscissa}; reduce k"
        ))),
        other => other,
    }
}

/// `Z(s) = int_0^1 |e^{2 pi i t} - r|^s dt` for `s > -1`, default level cap.
pub fn zeta_mahler_integral(
    s: &HpReal,
    point: &UnitCirclePoint,
    tol: &HpReal,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult> {
    zeta_mahler_integral_with_levels(s, point, tol, DEFAULT_MAX_LEVEL, ctx)
}

pub fn zeta_mahler_integral_with_levels(
    s: &HpReal,
    point: &UnitCirclePoint,
    tol: &HpReal,
    max_level: u32,
    ctx: &PrecisionContext,
) -> Result<QuadratureResult> {
    if !s.is_finite() || *s <= -1 {
        return Err(domain(format!(
            "|P|^s is integrable on the circle only for s > -1; got s = {}",
            s.to_f64()
        )));
    }
    if !(*tol > 0) {
        return Err(domain("tolerance must be positive"));
    }
    if s.is_zero() {
        return Ok(trivial(ctx));
    }
    let prec = ctx.prec() + 16;
    let exponent = Float::with_val(prec, s);
    circle_integral(
        |log_value| Float::with_val(prec, &exponent * log_value).exp(),
        point,
        tol,
        max_level,
        ctx,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(30).unwrap()
    }

    #[test]
    fn angle_is_reduced() {
        let c = ctx();
        let p = UnitCirclePoint::from_f64(1.25, &c).unwrap();
        assert_eq!(*p.angle(), 0.25);
        let p = UnitCirclePoint::from_f64(-0.25, &c).unwrap();
        assert_eq!(*p.angle(), 0.75);
        assert!(UnitCirclePoint::from_f64(f64::NAN, &c).is_err());
    }

    #[test]
    fn zeroth_moment_is_exact() {
        let c = ctx();
        let r = mahler_integral(0, &UnitCirclePoint::one(&c), &c.pow10(-40), &c).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.error_estimate.is_zero());
        assert!(r.nodes > 0);
        let z =
            zeta_mahler_integral(&c.zero(), &UnitCirclePoint::one(&c), &c.pow10(-5), &c).unwrap();
        assert_eq!(z.value, 1);
    }

    #[test]
    fn first_moment_vanishes() {
        let c = ctx();
        let tol = c.pow10(-12);
        for phi in [0.0, 0.37] {
            let p = UnitCirclePoint::from_f64(phi, &c).unwrap();
            let r = mahler_integral(1, &p, &tol, &c).unwrap();
            assert!(r.value.to_f64().abs() <= 1e-12, "phi = {phi}: {}", r.value);
        }
    }

    #[test]
    fn divergent_exponent_rejected() {
        let c = ctx();
        let p = UnitCirclePoint::one(&c);
        assert!(matches!(
            zeta_mahler_integral(&c.int(-1), &p, &c.pow10(-5), &c),
            Err(MahlerError::Domain(_))
        ));
        assert!(mahler_integral(2, &p, &c.zero(), &c).is_err());
    }
}
