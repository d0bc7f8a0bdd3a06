//! Closed-form characteristic functions of the beam operator.
//!
//! Eigenvalue candidates of the finite-beam operator outside `(0, 1/k)` are
//! reparametrized by the coordinate `kappa = (1 - 1/(lambda k))^(1/4)` and the
//! dimensionless length `L = 2*sqrt(2)*l*alpha`.  Such a candidate is an
//! eigenvalue exactly when `psi_L(kappa) = q(kappa)`, where
//!
//! - `q(kappa)  = (kappa - 1)^2 / (kappa + 1)^2`,
//! - `psi_L(kappa) = exp(L*kappa) * f(cos g_L(kappa))` with
//!   `f(t) = (2 - t) - sqrt((2 - t)^2 - 1)`,
//! - `g_L(kappa) = L*kappa - ghat(kappa)` and `ghat` a branch-corrected
//!   arctangent decreasing from `0` to `-2*pi`.
//!
//! This module evaluates every one of those functions, their derivatives, and
//! the monotone inverses `g_L^{-1}` and `ghat^{-1}`, with branch dispatch done
//! on `kappa`-intervals so the arctangent poles never have to be unwound.

use serde::Serialize;

use crate::{Error, Result, Scalar};

/// Tolerance below which `g_L(kappa)` is treated as sitting on a multiple of
/// `2*pi`, where `psi_L` has a corner and no derivative is reported.
pub const NONDIFF_TOL: f64 = 1e-9;

const INVERT_MAX_ITER: usize = 200;

/// Physical beam parameters together with the derived constants.
///
/// `alpha = (k/(EI))^(1/4)` is the reciprocal decay length of the Green's
/// kernel and `big_l = 2*sqrt(2)*l*alpha` the dimensionless beam length; both
/// are computed once here so every consumer agrees on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamConfig<T> {
    /// Young's modulus `E` (force/area).
    pub e: T,
    /// Mass moment of inertia `I` (length^4).
    pub i: T,
    /// Foundation spring constant `k` (force/length^2).
    pub k: T,
    /// Half-length of the beam domain `[-l, l]`.
    pub l: T,
    /// Derived: `(k/(EI))^(1/4)`.
    pub alpha: T,
    /// Derived: `2*sqrt(2)*l*alpha`.
    pub big_l: T,
}

impl<T: Scalar> BeamConfig<T> {
    pub fn new(e: T, i: T, k: T, l: T) -> Result<Self> {
        for (name, v) in [("E", e), ("I", i), ("k", k), ("l", l)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite and > 0 (got {v})")));
            }
        }
        let alpha = (k / (e * i)).sqrt().sqrt();
        let big_l = T::of(2.0) * T::SQRT_2() * l * alpha;
        Ok(Self { e, i, k, l, alpha, big_l })
    }
}

/// An eigenvalue candidate `lambda` outside `[0, 1/k]` paired with its
/// characteristic coordinate `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint<T> {
    pub lambda: T,
    pub kappa: T,
}

impl<T: Scalar> SpectralPoint<T> {
    /// `kappa = (1 - 1/(lambda k))^(1/4)`; requires `lambda` outside `[0, 1/k]`.
    ///
    /// `lambda < 0` maps to `kappa > 1` and `lambda > 1/k` to `0 < kappa < 1`.
    pub fn from_lambda(lambda: T, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::Domain(format!("k must be > 0 (got {k})")));
        }
        if !lambda.is_finite() || (lambda >= T::zero() && lambda <= T::one() / k) {
            return Err(Error::Domain(format!(
                "lambda must be finite and outside [0, 1/k] (got {lambda})"
            )));
        }
        let kappa = (T::one() - T::one() / (lambda * k)).sqrt().sqrt();
        Ok(Self { lambda, kappa })
    }

    /// Inverse map `lambda = 1/(k (1 - kappa^4))`; requires `kappa > 0`, `kappa != 1`.
    pub fn from_kappa(kappa: T, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::Domain(format!("k must be > 0 (got {k})")));
        }
        if !(kappa > T::zero()) || kappa == T::one() || !kappa.is_finite() {
            return Err(Error::Domain(format!(
                "kappa must be finite, > 0 and != 1 (got {kappa})"
            )));
        }
        let lambda = T::one() / (k * (T::one() - kappa.powi(4)));
        Ok(Self { lambda, kappa })
    }
}

/// Value of `ghat` together with the arctangent piece it came from.
///
/// Pieces are indexed 0, 1, 2 over `[0, sqrt(2)-1)`, `[sqrt(2)-1, sqrt(2)+1)`
/// and `[sqrt(2)+1, inf)`; the two boundary points return the exact constants
/// `-pi/2` and `-3*pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchedAngle<T> {
    pub value: T,
    pub branch_index: u8,
}

/// Value of `psi_L` with an overflow-safe logarithmic companion.
///
/// `ln_value = L*kappa + ln f(cos g_L(kappa))` stays finite long after
/// `exp(L*kappa)` has overflowed; `saturated` flags that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue<T> {
    pub value: T,
    pub ln_value: T,
    pub saturated: bool,
}

fn check_nonneg<T: Scalar>(v: T, name: &str) -> Result<()> {
    if !(v >= T::zero()) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite and >= 0 (got {v})")));
    }
    Ok(())
}

fn check_pos<T: Scalar>(v: T, name: &str) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite and > 0 (got {v})")));
    }
    Ok(())
}

/// `q(kappa) = ((kappa - 1)/(kappa + 1))^2`, the rational side of the
/// characteristic equation.  Strictly decreasing from `q(0) = 1` to
/// `q(1) = 0`, then strictly increasing with limit `1`.
pub fn eval_q<T: Scalar>(kappa: T) -> Result<T> {
    check_nonneg(kappa, "kappa")?;
    let r = (kappa - T::one()) / (kappa + T::one());
    Ok(r * r)
}

/// `q'(kappa) = 4 (kappa - 1) / (kappa + 1)^3`.
pub fn eval_q_prime<T: Scalar>(kappa: T) -> Result<T> {
    check_nonneg(kappa, "kappa")?;
    let p = kappa + T::one();
    Ok(T::of(4.0) * (kappa - T::one()) / (p * p * p))
}

fn check_cosine_arg<T: Scalar>(t: T) -> Result<()> {
    if !(t >= -T::one() && t <= T::one()) {
        return Err(Error::Domain(format!("t must lie in [-1, 1] (got {t})")));
    }
    Ok(())
}

/// `f(t) = (2 - t) - sqrt((2 - t)^2 - 1)` for `t` in `[-1, 1]`.
///
/// The radicand is computed in the factored form `(1 - t)(3 - t)` and for
/// `t >= 0` the conjugate form `1 / ((2 - t) + sqrt(...))` is used; both
/// rewrites are exact algebraically and avoid the cancellation of the naive
/// expression near `t = 1`.
pub fn eval_f<T: Scalar>(t: T) -> Result<T> {
    check_cosine_arg(t)?;
    let root = ((T::one() - t) * (T::of(3.0) - t)).sqrt();
    let s = T::of(2.0) - t;
    if t >= T::zero() {
        Ok(T::one() / (s + root))
    } else {
        Ok(s - root)
    }
}

/// `f'(t) = f(t) / sqrt((2 - t)^2 - 1)`; singular at `t = 1`.
pub fn eval_f_prime<T: Scalar>(t: T) -> Result<T> {
    check_cosine_arg(t)?;
    let radicand = (T::one() - t) * (T::of(3.0) - t);
    if radicand == T::zero() {
        return Err(Error::Singular("f'(t) diverges at t = 1".to_string()));
    }
    Ok(eval_f(t)? / radicand.sqrt())
}

/// Branch-corrected angle `ghat(kappa)`, continuous and strictly decreasing
/// from `ghat(0) = 0` to `-2*pi`.
///
/// Dispatch is on `kappa`-intervals rather than on the arctangent value, so
/// the poles of the rational argument at `kappa^4 - 6 kappa^2 + 1 = 0` are
/// never crossed within a piece; the two roots return exact constants.
pub fn eval_ghat<T: Scalar>(kappa: T) -> Result<BranchedAngle<T>> {
    check_nonneg(kappa, "kappa")?;
    let lo = T::SQRT_2() - T::one();
    let hi = T::SQRT_2() + T::one();
    if kappa == lo {
        return Ok(BranchedAngle { value: -T::FRAC_PI_2(), branch_index: 1 });
    }
    if kappa == hi {
        return Ok(BranchedAngle { value: -T::of(1.5) * T::PI(), branch_index: 2 });
    }
    let k2 = kappa * kappa;
    let num = T::of(4.0) * kappa * (k2 - T::one());
    let den = k2 * k2 - T::of(6.0) * k2 + T::one();
    let theta = (num / den).atan();
    if kappa < lo {
        Ok(BranchedAngle { value: theta, branch_index: 0 })
    } else if kappa < hi {
        Ok(BranchedAngle { value: theta - T::PI(), branch_index: 1 })
    } else {
        Ok(BranchedAngle { value: theta - T::TAU(), branch_index: 2 })
    }
}

/// `ghat'(kappa) = -4 / (kappa^2 + 1)`.
pub fn eval_ghat_prime<T: Scalar>(kappa: T) -> Result<T> {
    check_nonneg(kappa, "kappa")?;
    Ok(-T::of(4.0) / (kappa * kappa + T::one()))
}

/// `g_L(kappa) = L*kappa - ghat(kappa)`: one-to-one and onto `[0, inf)`.
pub fn eval_gl<T: Scalar>(kappa: T, big_l: T) -> Result<T> {
    check_pos(big_l, "L")?;
    Ok(big_l * kappa - eval_ghat(kappa)?.value)
}

/// `g_L'(kappa) = L + 4 / (kappa^2 + 1) > L`.
pub fn eval_gl_prime<T: Scalar>(kappa: T, big_l: T) -> Result<T> {
    check_nonneg(kappa, "kappa")?;
    check_pos(big_l, "L")?;
    Ok(big_l + T::of(4.0) / (kappa * kappa + T::one()))
}

/// Monotone inverse of `g_L`: the unique `kappa >= 0` with
/// `|g_L(kappa) - t| <= tol`.
///
/// Since `L*kappa <= g_L(kappa) < L*kappa + 2*pi`, the root is bracketed by
/// `[(t - 2*pi)/L, t/L]`; Newton steps with `g_L'` run inside that bracket
/// and fall back to bisection whenever they would leave it.
pub fn invert_gl<T: Scalar>(t: T, big_l: T, tol: T) -> Result<T> {
    check_nonneg(t, "t")?;
    check_pos(big_l, "L")?;
    check_pos(tol, "tol")?;
    if t == T::zero() {
        return Ok(T::zero());
    }
    let mut lo = ((t - T::TAU()) / big_l).max(T::zero());
    let mut hi = t / big_l;
    let mut x = T::of(0.5) * (lo + hi);
    let mut residual = T::nan();
    for _ in 0..INVERT_MAX_ITER {
        residual = eval_gl(x, big_l)? - t;
        if residual.abs() <= tol {
            return Ok(x);
        }
        if residual > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - residual / eval_gl_prime(x, big_l)?;
        x = if newton > lo && newton < hi { newton } else { T::of(0.5) * (lo + hi) };
    }
    Err(Error::NoConvergence {
        iterations: INVERT_MAX_ITER,
        residual: residual.abs().to_f64().unwrap_or(f64::NAN),
    })
}

/// `psi_L(kappa) = exp(L*kappa) * f(cos g_L(kappa))`.
///
/// The plain value overflows once `L*kappa` passes the exponent range; the
/// returned [`PsiValue`] then carries `value = inf`, `saturated = true` and a
/// finite `ln_value` so comparisons against any bounded quantity stay
/// decidable.
pub fn eval_psi<T: Scalar>(kappa: T, big_l: T) -> Result<PsiValue<T>> {
    check_nonneg(kappa, "kappa")?;
    let g = eval_gl(kappa, big_l)?;
    let fc = f_of_half_angle((g * T::of(0.5)).sin());
    let lk = big_l * kappa;
    let value = lk.exp() * fc;
    Ok(PsiValue { value, ln_value: lk + fc.ln(), saturated: !value.is_finite() })
}

/// `f(cos g)` in terms of `hs = sin(g/2)`.
///
/// With `1 - cos g = 2 hs^2` and `3 - cos g = 2 (1 + hs^2)` the radicand
/// factors exactly, so nothing is lost to the `1 - cos` cancellation when
/// `g` sits near a multiple of `2*pi` (where the margin over `q` is tightest).
fn f_of_half_angle<T: Scalar>(hs: T) -> T {
    let hs2 = hs * hs;
    let s = T::one() + T::of(2.0) * hs2; // 2 - cos g
    let root = T::of(2.0) * hs.abs() * (T::one() + hs2).sqrt();
    if hs2 <= T::of(0.5) {
        T::one() / (s + root)
    } else {
        s - root
    }
}

/// `sin(t) / sqrt((2 - cos t)^2 - 1)` evaluated through half-angle factors.
///
/// With `(2 - cos t)^2 - 1 = (1 - cos t)(3 - cos t)`, `1 - cos t = 2 sin^2(t/2)`
/// and `3 - cos t = 2 (1 + sin^2(t/2))`, the ratio collapses to
/// `sign(sin(t/2)) * cos(t/2) / sqrt(1 + sin^2(t/2))`, which is stable at the
/// `0/0` points `t = 2*pi*n` and bounded by 1 in magnitude by construction.
pub fn sin_ratio<T: Scalar>(t: T) -> T {
    let half = t * T::of(0.5);
    let (hs, hc) = (half.sin(), half.cos());
    hs.signum() * hc / (T::one() + hs * hs).sqrt()
}

/// `psi_L'(kappa) = psi_L(kappa) * { L - sin_ratio(g_L(kappa)) * g_L'(kappa) }`.
///
/// `psi_L` has corners where `g_L(kappa)` crosses a positive multiple of
/// `2*pi`; within [`NONDIFF_TOL`] of such a point the derivative is refused.
/// Callers needing one-sided slopes there should use finite differences.
pub fn eval_psi_prime<T: Scalar>(kappa: T, big_l: T) -> Result<T> {
    check_pos(kappa, "kappa")?;
    let g = eval_gl(kappa, big_l)?;
    let n = (g / T::TAU()).round();
    if n >= T::one() {
        let offset = g - n * T::TAU();
        if offset.abs() < T::of(NONDIFF_TOL) {
            return Err(Error::Nondifferentiable {
                offset: offset.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let psi = eval_psi(kappa, big_l)?;
    Ok(psi.value * (big_l - sin_ratio(g) * eval_gl_prime(kappa, big_l)?))
}

/// Closed-form branch of `ghat^{-1}` on `(3*pi/2, 2*pi)`:
/// `ghat^{-1}(-t) = (sqrt(1 + cos t) + sqrt(2)) / sqrt(1 - cos t)`.
///
/// Evaluated via half angles (`1 +- cos t = 2 cos^2(t/2), 2 sin^2(t/2)`) as
/// `(1 + |cos(t/2)|) / sin(t/2)`, which stays accurate as `t` approaches
/// `2*pi` where the direct `1 - cos t` cancels.
pub fn ghat_inverse_closed<T: Scalar>(t: T) -> Result<T> {
    if !(t > T::of(1.5) * T::PI() && t < T::TAU()) {
        return Err(Error::Domain(format!("t must lie in (3*pi/2, 2*pi) (got {t})")));
    }
    let half = t * T::of(0.5);
    Ok((T::one() + half.cos().abs()) / half.sin())
}

/// `q(ghat^{-1}(-t)) = (3 - cos t - 2*sqrt(2)*sqrt(1 - cos t)) / (1 + cos t)`
/// on `(3*pi/2, 2*pi)`, with `sqrt(1 - cos t)` expanded as `sqrt(2) sin(t/2)`.
///
/// This is an independent route to the same value as
/// `eval_q(ghat_inverse_closed(t))`.
pub fn q_of_ghat_inverse<T: Scalar>(t: T) -> Result<T> {
    if !(t > T::of(1.5) * T::PI() && t < T::TAU()) {
        return Err(Error::Domain(format!("t must lie in (3*pi/2, 2*pi) (got {t})")));
    }
    let ct = t.cos();
    let hs = (t * T::of(0.5)).sin();
    Ok((T::of(3.0) - ct - T::of(4.0) * hs) / (T::one() + ct))
}

/// Monotone inverse of `ghat`: the unique `kappa >= 0` with
/// `|ghat(kappa) - y| <= tol`, for `y` in `(-2*pi, 0]`.
pub fn invert_ghat<T: Scalar>(y: T, tol: T) -> Result<T> {
    if !(y <= T::zero() && y > -T::TAU()) {
        return Err(Error::Domain(format!("y must lie in (-2*pi, 0] (got {y})")));
    }
    check_pos(tol, "tol")?;
    if y == T::zero() {
        return Ok(T::zero());
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut doublings = 0usize;
    while eval_ghat(hi)?.value > y {
        hi = hi + hi;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence { iterations: doublings, residual: f64::NAN });
        }
    }
    let mut x = T::of(0.5) * (lo + hi);
    let mut residual = T::nan();
    for _ in 0..INVERT_MAX_ITER {
        residual = eval_ghat(x)?.value - y;
        if residual.abs() <= tol {
            return Ok(x);
        }
        // ghat is decreasing: positive residual means x is left of the root.
        if residual > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - residual / eval_ghat_prime(x)?;
        x = if newton > lo && newton < hi { newton } else { T::of(0.5) * (lo + hi) };
    }
    Err(Error::NoConvergence {
        iterations: INVERT_MAX_ITER,
        residual: residual.abs().to_f64().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    // Frozen by an independent high-precision evaluation.
    const PSI_1_1: f64 = 0.557539394227413630433217507822;
    const PSI_PRIME_1_1: f64 = 1.16025550755750343543563573152;
    const F_AT_0: f64 = 0.267949192431122706472553658494;
    const F_PRIME_AT_0: f64 = 0.154700538379251529018297561004;
    const F_AT_M1: f64 = 0.171572875253809902396622551581;
    const F_PRIME_AT_M1: f64 = 0.0606601717798212866012665431573;
    const GHAT_INV_7PI4: f64 = 5.02733949212584810451497507106;
    const Q_GHAT_INV_7PI4: f64 = 0.446462692171689568564458052384;

    #[test]
    fn q_point_values() {
        assert_eq!(eval_q(0.0f64).unwrap(), 1.0);
        assert_eq!(eval_q(1.0f64).unwrap(), 0.0);
        assert!((eval_q(3.0f64).unwrap() - 0.25).abs() < 1e-15);
        assert!(eval_q(-1e-12f64).is_err());
        assert!(eval_q(f64::NAN).is_err());
    }

    #[test]
    fn q_prime_point_values() {
        assert_eq!(eval_q_prime(1.0f64).unwrap(), 0.0);
        assert_eq!(eval_q_prime(0.0f64).unwrap(), -4.0);
        assert!((eval_q_prime(3.0f64).unwrap() - 0.125).abs() < 1e-15);
        assert!(eval_q_prime(-0.5f64).is_err());
    }

    #[test]
    fn q_is_v_shaped_around_one() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let a = rng.gen_range(0.0..1.0);
            let b = rng.gen_range(a..1.0f64);
            if a < b {
                assert!(eval_q(a).unwrap() > eval_q(b).unwrap());
            }
            let c = rng.gen_range(1.0..50.0);
            let d = rng.gen_range(c..51.0f64);
            if c < d {
                assert!(eval_q(c).unwrap() < eval_q(d).unwrap());
            }
        }
    }

    #[test]
    fn f_point_values_and_domain() {
        assert_eq!(eval_f(1.0f64).unwrap(), 1.0);
        assert!((eval_f(-1.0f64).unwrap() - F_AT_M1).abs() < 1e-15);
        assert!((eval_f(0.0f64).unwrap() - F_AT_0).abs() < 1e-15);
        assert!(eval_f(1.0 + 1e-12).is_err());
        assert!(eval_f(-1.0 - 1e-12).is_err());
        // range and monotonicity on a sweep
        let mut prev = eval_f(-1.0f64).unwrap();
        for i in 1..=1000 {
            let t = -1.0 + 2.0 * i as f64 / 1000.0;
            let v = eval_f(t).unwrap();
            assert!(v >= 3.0 - 2.0 * SQRT2 - 1e-15 && v <= 1.0 + 1e-15);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn f_prime_values_and_singularity() {
        assert!((eval_f_prime(-1.0f64).unwrap() - F_PRIME_AT_M1).abs() < 1e-15);
        assert!((eval_f_prime(0.0f64).unwrap() - F_PRIME_AT_0).abs() < 1e-15);
        assert!(matches!(eval_f_prime(1.0f64), Err(Error::Singular(_))));
        assert!(eval_f_prime(1.0 - 1e-12).unwrap() > 1e5);
    }

    #[test]
    fn ghat_branch_values() {
        let g0 = eval_ghat(0.0f64).unwrap();
        assert_eq!(g0.value, 0.0);
        assert_eq!(g0.branch_index, 0);
        let glo = eval_ghat(SQRT2 - 1.0).unwrap();
        assert_eq!(glo.value, -std::f64::consts::FRAC_PI_2);
        assert_eq!(glo.branch_index, 1);
        let ghi = eval_ghat(SQRT2 + 1.0).unwrap();
        assert!((ghi.value + 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(ghi.branch_index, 2);
        let g1 = eval_ghat(1.0f64).unwrap();
        assert!((g1.value + std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(g1.branch_index, 1);
    }

    #[test]
    fn ghat_branch_continuity() {
        for d in [-1e-9, 1e-9] {
            let v = eval_ghat(SQRT2 - 1.0 + d).unwrap().value;
            assert!((v + std::f64::consts::FRAC_PI_2).abs() < 1e-6, "got {v}");
            let v = eval_ghat(SQRT2 + 1.0 + d).unwrap().value;
            assert!((v + 1.5 * std::f64::consts::PI).abs() < 1e-6, "got {v}");
        }
    }

    #[test]
    fn ghat_decreasing_and_bounded() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..500 {
            let a: f64 = rng.gen_range(0.0..80.0);
            let b = a + rng.gen_range(1e-6..5.0);
            let va = eval_ghat(a).unwrap().value;
            let vb = eval_ghat(b).unwrap().value;
            assert!(vb < va);
            assert!(va <= 0.0 && va > -std::f64::consts::TAU);
        }
        assert!(eval_ghat(1e8f64).unwrap().value + std::f64::consts::TAU < 1e-7);
    }

    #[test]
    fn ghat_prime_values() {
        assert_eq!(eval_ghat_prime(0.0f64).unwrap(), -4.0);
        assert_eq!(eval_ghat_prime(1.0f64).unwrap(), -2.0);
        let tail = eval_ghat_prime(1e8f64).unwrap();
        assert!(tail < 0.0 && tail > -1e-15);
    }

    #[test]
    fn gl_point_values() {
        assert_eq!(eval_gl(0.0f64, 3.7).unwrap(), 0.0);
        assert!((eval_gl(1.0f64, 1.0).unwrap() - (1.0 + std::f64::consts::PI)).abs() < 1e-15);
        let expect = 2.0 * (SQRT2 - 1.0) + std::f64::consts::FRAC_PI_2;
        assert!((eval_gl(SQRT2 - 1.0, 2.0).unwrap() - expect).abs() < 1e-15);
        assert!(eval_gl(-0.1f64, 1.0).is_err());
        assert!(eval_gl(1.0f64, 0.0).is_err());
    }

    #[test]
    fn gl_prime_values() {
        assert_eq!(eval_gl_prime(0.0f64, 1.0).unwrap(), 5.0);
        assert_eq!(eval_gl_prime(1.0f64, 1.0).unwrap(), 3.0);
        assert!((eval_gl_prime(1e9f64, 7.0).unwrap() - 7.0).abs() < 1e-15);
    }

    #[test]
    fn invert_gl_examples() {
        assert_eq!(invert_gl(0.0f64, 5.0, 1e-12).unwrap(), 0.0);
        let x = invert_gl(1.0 + std::f64::consts::PI, 1.0, 1e-13).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
        let x = invert_gl(1.5 * std::f64::consts::PI, 0.01, 1e-12).unwrap();
        assert!(x > 1.0 && x < 1.0 + SQRT2);
    }

    #[test]
    fn invert_gl_round_trip() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..200 {
            let t: f64 = rng.gen_range(0.0..100.0);
            let big_l = rng.gen_range(0.01..50.0);
            let kappa = invert_gl(t, big_l, 1e-12).unwrap();
            assert!((eval_gl(kappa, big_l).unwrap() - t).abs() <= 1e-10);
        }
    }

    #[test]
    fn psi_point_values() {
        assert_eq!(eval_psi(0.0f64, 0.7).unwrap().value, 1.0);
        let p = eval_psi(1.0f64, 1.0).unwrap();
        assert!((p.value - PSI_1_1).abs() < 1e-13, "got {}", p.value);
        assert!(!p.saturated);
        assert!((p.ln_value - PSI_1_1.ln()).abs() < 1e-12);
    }

    #[test]
    fn psi_at_corner_points_equals_pure_exponential() {
        // where g_L(kappa) = 2*pi*n, f(cos g) = f(1) = 1
        for (n, big_l) in [(1.0, 1.0), (2.0, 0.3), (3.0, 4.0)] {
            let t = n * std::f64::consts::TAU;
            let kappa = invert_gl(t, big_l, 1e-12).unwrap();
            let p = eval_psi(kappa, big_l).unwrap();
            let expect = (big_l * kappa).exp();
            assert!((p.value - expect).abs() / expect < 1e-9);
        }
    }

    #[test]
    fn psi_saturates_but_stays_comparable() {
        let p = eval_psi(800.0f64, 1.0).unwrap();
        assert!(p.saturated);
        assert!(p.value.is_infinite());
        assert!(p.ln_value > 700.0 && p.ln_value.is_finite());
        let q = eval_q(800.0f64).unwrap();
        assert!(p.ln_value - q.ln() > 0.0);
    }

    #[test]
    fn psi_prime_at_half_turn_is_l_times_psi() {
        // g_L(kappa) = pi => sin term vanishes
        let big_l = 1.0f64;
        let kappa = invert_gl(std::f64::consts::PI, big_l, 1e-13).unwrap();
        let psi = eval_psi(kappa, big_l).unwrap().value;
        let d = eval_psi_prime(kappa, big_l).unwrap();
        assert!((d - big_l * psi).abs() / psi < 1e-9);
    }

    #[test]
    fn psi_prime_rejects_corner_points() {
        let big_l = 1.0f64;
        let kappa = invert_gl(std::f64::consts::TAU, big_l, 1e-14).unwrap();
        assert!(matches!(
            eval_psi_prime(kappa, big_l),
            Err(Error::Nondifferentiable { .. })
        ));
        // a hair outside the tolerance band evaluates fine
        assert!(eval_psi_prime(kappa + 1e-6, big_l).is_ok());
    }

    #[test]
    fn psi_prime_frozen_value_and_finite_difference() {
        let d = eval_psi_prime(1.0f64, 1.0).unwrap();
        assert!((d - PSI_PRIME_1_1).abs() < 1e-12, "got {d}");
        let h = 1e-6;
        let fd = (eval_psi(1.0 + h, 1.0).unwrap().value - eval_psi(1.0 - h, 1.0).unwrap().value)
            / (2.0 * h);
        assert!((d - fd).abs() / d.abs() < 1e-6);
    }

    #[test]
    fn psi_prime_lower_bound() {
        // psi' >= -psi * 4/(kappa^2+1) wherever defined
        let mut rng = StdRng::seed_from_u64(14);
        let mut checked = 0;
        while checked < 500 {
            let kappa = rng.gen_range(0.01..20.0);
            let big_l = rng.gen_range(0.01..5.0);
            match eval_psi_prime(kappa, big_l) {
                Ok(d) => {
                    let psi = eval_psi(kappa, big_l).unwrap().value;
                    let bound = -psi * 4.0 / (kappa * kappa + 1.0);
                    assert!(d >= bound - 1e-12 - 1e-12 * psi, "kappa={kappa} L={big_l}");
                    checked += 1;
                }
                Err(Error::Nondifferentiable { .. }) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn ghat_inverse_closed_values() {
        let t = 7.0 * std::f64::consts::PI / 4.0;
        assert!((ghat_inverse_closed(t).unwrap() - GHAT_INV_7PI4).abs() < 1e-13);
        // boundary limit 1 + sqrt(2)
        let near = ghat_inverse_closed(1.5 * std::f64::consts::PI + 1e-9).unwrap();
        assert!((near - (1.0 + SQRT2)).abs() < 1e-6);
        // divergence toward 2*pi
        assert!(ghat_inverse_closed(std::f64::consts::TAU - 1e-6).unwrap() > 1e5);
        assert!(ghat_inverse_closed(1.5 * std::f64::consts::PI).is_err());
        assert!(ghat_inverse_closed(std::f64::consts::TAU).is_err());
        assert!(ghat_inverse_closed(1.0f64).is_err());
    }

    #[test]
    fn ghat_inverse_closed_inverts_ghat() {
        for i in 1..400 {
            let t = 1.5 * std::f64::consts::PI
                + 0.5 * std::f64::consts::PI * i as f64 / 400.0;
            let kappa = ghat_inverse_closed(t).unwrap();
            assert!(kappa > 1.0 + SQRT2);
            let back = eval_ghat(kappa).unwrap().value;
            assert!((back + t).abs() < 1e-9, "t={t} residual={}", back + t);
        }
    }

    #[test]
    fn q_of_ghat_inverse_consistency() {
        let t = 7.0 * std::f64::consts::PI / 4.0;
        assert!((q_of_ghat_inverse(t).unwrap() - Q_GHAT_INV_7PI4).abs() < 1e-13);
        // two independent routes agree
        let direct = q_of_ghat_inverse(5.0f64).unwrap();
        let via_kappa = eval_q(ghat_inverse_closed(5.0f64).unwrap()).unwrap();
        assert!((direct - via_kappa).abs() < 1e-12);
        // f(cos t) dominates on the interval
        assert!(eval_f(5.0f64.cos()).unwrap() - direct > 0.0);
        assert!(q_of_ghat_inverse(1.0f64).is_err());
    }

    #[test]
    fn invert_ghat_values() {
        let k = invert_ghat(-std::f64::consts::PI, 1e-13).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        let k = invert_ghat(-1.5 * std::f64::consts::PI, 1e-13).unwrap();
        assert!((k - (1.0 + SQRT2)).abs() < 1e-11);
        let closed = ghat_inverse_closed(5.5f64).unwrap();
        let iterated = invert_ghat(-5.5, 1e-13).unwrap();
        assert!((closed - iterated).abs() < 1e-9);
        assert!(invert_ghat(0.5f64, 1e-12).is_err());
        assert!(invert_ghat(-std::f64::consts::TAU, 1e-12).is_err());
    }

    #[test]
    fn spectral_point_round_trip() {
        for k in [1.0f64, 0.5] {
            for lambda in [-1000.0, -1.0, -1e-3, 1.0001 / k, 2.0 / k, 1000.0 / k] {
                let p = SpectralPoint::from_lambda(lambda, k).unwrap();
                if lambda < 0.0 {
                    assert!(p.kappa > 1.0);
                } else {
                    assert!(p.kappa > 0.0 && p.kappa < 1.0);
                }
                let back = SpectralPoint::from_kappa(p.kappa, k).unwrap();
                assert!(
                    (back.lambda - lambda).abs() / lambda.abs() < 1e-12,
                    "lambda={lambda} back={}",
                    back.lambda
                );
            }
            assert!(SpectralPoint::from_lambda(0.5 / k, k).is_err());
            assert!(SpectralPoint::from_lambda(0.0, k).is_err());
            assert!(SpectralPoint::from_kappa(1.0, k).is_err());
        }
    }

    #[test]
    fn three_minus_cos_identity() {
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-30.0..30.0);
            let c = x.cos();
            let lhs = (2.0 - c) * (2.0 - c) - 1.0;
            let rhs = (1.0 - c) * (3.0 - c);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn sin_ratio_bounds_and_agreement() {
        let mut rng = StdRng::seed_from_u64(16);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-40.0..40.0);
            let r = sin_ratio(t);
            assert!(r.abs() <= 1.0 + 1e-15);
            let den = ((2.0 - t.cos()).powi(2) - 1.0).sqrt();
            // the naive quotient itself loses accuracy as den -> 0
            if den > 0.5 {
                assert!((r - t.sin() / den).abs() < 1e-12, "t={t}");
            }
        }
        // limits at multiples of 2*pi are +-1
        assert!((sin_ratio(1e-12f64) - 1.0).abs() < 1e-10);
        assert!((sin_ratio(std::f64::consts::TAU - 1e-12) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn derivative_finite_difference_consistency() {
        let mut rng = StdRng::seed_from_u64(17);
        let h = 1e-6;
        for _ in 0..200 {
            let kappa: f64 = rng.gen_range(0.05..20.0);
            let big_l: f64 = rng.gen_range(0.05..10.0);
            let fd_q = (eval_q(kappa + h).unwrap() - eval_q(kappa - h).unwrap()) / (2.0 * h);
            let d = eval_q_prime(kappa).unwrap();
            if d.abs() > 1e-8 {
                assert!((fd_q - d).abs() / d.abs() < 1e-6);
            }
            let fd_g = (eval_ghat(kappa + h).unwrap().value - eval_ghat(kappa - h).unwrap().value)
                / (2.0 * h);
            let dg = eval_ghat_prime(kappa).unwrap();
            assert!((fd_g - dg).abs() / dg.abs() < 1e-6);
            let fd_gl = (eval_gl(kappa + h, big_l).unwrap() - eval_gl(kappa - h, big_l).unwrap())
                / (2.0 * h);
            let dgl = eval_gl_prime(kappa, big_l).unwrap();
            assert!((fd_gl - dgl).abs() / dgl < 1e-6);
            let t: f64 = rng.gen_range(-0.95..0.95);
            let fd_f = (eval_f(t + h).unwrap() - eval_f(t - h).unwrap()) / (2.0 * h);
            let df = eval_f_prime(t).unwrap();
            assert!((fd_f - df).abs() / df.abs() < 1e-6);
        }
    }

    #[test]
    fn beam_config_derived_constants() {
        let c = BeamConfig::new(2.0f64, 3.0, 5.0, 0.7).unwrap();
        assert!((c.alpha.powi(4) - 5.0 / 6.0).abs() < 1e-15);
        assert!((c.big_l - 2.0 * SQRT2 * 0.7 * c.alpha).abs() < 1e-15);
        assert!(BeamConfig::new(0.0f64, 1.0, 1.0, 1.0).is_err());
        assert!(BeamConfig::new(1.0f64, 1.0, -2.0, 1.0).is_err());
        assert!(BeamConfig::new(1.0f64, f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn single_precision_instantiation() {
        assert_eq!(eval_q(1.0f32).unwrap(), 0.0);
        assert!((eval_psi(0.0f32, 1.0).unwrap().value - 1.0).abs() < 1e-6);
        let lo = std::f32::consts::SQRT_2 - 1.0;
        for d in [-1e-4f32, 1e-4] {
            let v = eval_ghat(lo + d).unwrap().value;
            assert!((v + std::f32::consts::FRAC_PI_2).abs() < 1e-3);
        }
        let c = BeamConfig::new(1.0f32, 1.0, 1.0, 1.0).unwrap();
        assert!((c.big_l - 2.0 * std::f32::consts::SQRT_2).abs() < 1e-6);
    }
}
