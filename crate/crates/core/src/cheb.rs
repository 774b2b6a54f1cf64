//! Chebyshev polynomials of the first kind, their fractional-order extension
//! `T_{1/L}` on `x >= 1`, and the generalized polynomials `a_L^(γ)` produced by
//! the phase-modulated recurrence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedule::zeta_closed_form;

/// Inputs this close to a branch joint `±1` are treated as lying on it.
pub const JOINT_EPS: f64 = 1e-14;

/// `T_n(x)` from the closed form on each branch.
///
/// Uses `cos(n·arccos x)` on `[-1, 1]` and `±cosh(n·arccosh|x|)` outside it.
/// The joints `x = ±1` (and anything within [`JOINT_EPS`]) return `(±1)^n`
/// exactly. Large arguments may return `±inf`; see [`checked_cheb_t`].
pub fn cheb_t(n: usize, x: f64) -> f64 {
    let sign_neg = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if (x - 1.0).abs() <= JOINT_EPS {
        return 1.0;
    }
    if (x + 1.0).abs() <= JOINT_EPS {
        return sign_neg;
    }
    let nf = n as f64;
    if x.abs() < 1.0 {
        (nf * x.acos()).cos()
    } else if x > 1.0 {
        (nf * x.acosh()).cosh()
    } else {
        sign_neg * (nf * (-x).acosh()).cosh()
    }
}

/// Like [`cheb_t`] but reports overflow instead of returning an infinity.
pub fn checked_cheb_t(n: usize, x: f64) -> Result<f64> {
    let v = cheb_t(n, x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { order: n, x })
    }
}

/// Fractional-order Chebyshev value `T_{1/L}(x) = cosh(arccosh(x)/L)` for `x >= 1`.
pub fn cheb_t_frac(big_l: usize, x: f64) -> Result<f64> {
    if big_l == 0 || big_l.is_multiple_of(2) {
        return Err(Error::Domain(format!("fractional order 1/L needs odd L >= 1, got L = {big_l}")));
    }
    if x.is_nan() || x < 1.0 - JOINT_EPS {
        return Err(Error::Domain(format!("T_(1/L) is only defined here for x >= 1, got {x}")));
    }
    if x <= 1.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((x.acosh() / big_l as f64).cosh().clamp(1.0, x))
}

/// `γ = 1 / T_{1/L}(1/δ)`, with the limits `γ(0) = 0` and `γ(1) = 1`.
///
/// # Panics
/// If `delta` lies outside `[0, 1]` or `big_l` is not odd.
pub fn gamma_of(delta: f64, big_l: usize) -> f64 {
    assert!((0.0..=1.0).contains(&delta), "delta must lie in [0, 1], got {delta}");
    assert!(big_l % 2 == 1, "L must be odd, got {big_l}");
    if delta == 0.0 {
        return 0.0;
    }
    if delta == 1.0 {
        return 1.0;
    }
    1.0 / (arccosh_recip(delta) / big_l as f64).cosh()
}

/// `arccosh(1/δ)` for `δ in (0, 1]`, computed without forming `1/δ - 1` by
/// subtraction: `arccosh(1/δ) = ln((1 + sqrt(1 - δ²)) / δ)`.
pub(crate) fn arccosh_recip(delta: f64) -> f64 {
    ((1.0 + (1.0 - delta * delta).sqrt()) / delta).ln()
}

/// The Dolph-Chebyshev ratio `T_L(x/γ) / T_L(1/γ)` for `γ in (0, 1]`, `|x| <= 1`.
///
/// Evaluated in exponential form when `|x|/γ > 1`, so neither numerator nor
/// denominator is ever materialized and the result never overflows.
pub fn dolph_chebyshev_ratio(big_l: usize, gamma: f64, x: f64) -> f64 {
    debug_assert!(gamma > 0.0 && gamma <= 1.0);
    let lf = big_l as f64;
    let v = clamp_acosh(1.0 / gamma);
    let y = x / gamma;
    if y.abs() <= 1.0 {
        let den = (lf * v).cosh();
        return cheb_t(big_l, y) / den;
    }
    let u = clamp_acosh(y.abs());
    let sign = if y < 0.0 && big_l % 2 == 1 { -1.0 } else { 1.0 };
    let mag = (lf * (u - v)).exp() * (1.0 + (-2.0 * lf * u).exp()) / (1.0 + (-2.0 * lf * v).exp());
    sign * mag
}

fn clamp_acosh(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.acosh()
    }
}

/// Generalized Chebyshev polynomial `a_L^(γ)(x)`.
///
/// Runs `a_h = x(1 + e^{-iΔ_h}) a_{h-1} - e^{-iΔ_h} a_{h-2}` with `a_0 = 1`,
/// `a_1 = x` and `Δ_h = ζ_h - ζ_{h-1}` taken from the closed-form phase
/// differences for `(L, γ)`. Its modulus equals `|T_L(x/γ)| / T_L(1/γ)`.
pub fn gen_cheb_a(big_l: usize, gamma: f64, x: f64) -> Result<Complex64> {
    if big_l.is_multiple_of(2) {
        return Err(Error::Domain(format!("L must be odd, got {big_l}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Domain(format!(
            "gamma must lie in (0, 1], got {gamma}; use the delta = 0 closed form instead"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    let zetas = zeta_closed_form((big_l - 1) / 2, gamma).zetas;
    let x = Complex64::new(x, 0.0);
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = x;
    for h in 1..big_l {
        let rot = Complex64::from_polar(1.0, -(zetas[h] - zetas[h - 1]));
        let next = x * (1.0 + rot) * cur - rot * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
