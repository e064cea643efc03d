//! Closed-form lower-bound expressions for Bloch-type constants and the
//! deterministic grid optimizers that locate their best parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coarse grid resolution per axis used by [`optimize_2d`].
pub const OPT_GRID: usize = 201;

/// Grid resolution per axis of the Landau penalty maximization.
pub const EH_GRID: usize = 401;

/// Refinement sub-grid resolution per axis.
const REFINE_GRID: usize = 21;

/// Number of 10x local refinement rounds.
const REFINE_ROUNDS: usize = 3;

/// Default optimizer box: the bounds vanish toward every edge, so the
/// optimum is interior.
pub const DEFAULT_GAMMA_RANGE: (f64, f64) = (1.0 + 1e-6, 50.0);
/// See [`DEFAULT_GAMMA_RANGE`].
pub const DEFAULT_SIGMA_RANGE: (f64, f64) = (1e-6, 1.0 - 1e-6);

/// An optimized parameter pair together with the bound it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams<T: Real> {
    /// Expansion-scale parameter, above one.
    pub gamma: T,
    /// Shrinkage parameter in (0, 1).
    pub sigma: T,
    /// The achieved lower bound.
    pub value: T,
}

/// Maximizing parameters of the Landau penalty and the resulting bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhParams<T: Real> {
    /// Evaluation radius of the penalty.
    pub rho: T,
    /// Coefficient-bound radius, in (rho, 1).
    pub r: T,
    /// Worst-case second coefficient modulus.
    pub a2: T,
    /// Worst-case third coefficient modulus.
    pub a3: T,
    /// The bound: rho minus the maximal penalty.
    pub value: T,
}

#[derive(Serialize, Deserialize)]
struct BoundParamsRepr {
    gamma: f64,
    sigma: f64,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct EhParamsRepr {
    rho: f64,
    r: f64,
    a2: f64,
    a3: f64,
    value: f64,
}

fn lossy<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> Serialize for BoundParams<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BoundParamsRepr {
            gamma: lossy(self.gamma),
            sigma: lossy(self.sigma),
            value: lossy(self.value),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for BoundParams<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = BoundParamsRepr::deserialize(deserializer)?;
        Ok(BoundParams {
            gamma: T::of(repr.gamma),
            sigma: T::of(repr.sigma),
            value: T::of(repr.value),
        })
    }
}

impl<T: Real> Serialize for EhParams<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EhParamsRepr {
            rho: lossy(self.rho),
            r: lossy(self.r),
            a2: lossy(self.a2),
            a3: lossy(self.a3),
            value: lossy(self.value),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for EhParams<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = EhParamsRepr::deserialize(deserializer)?;
        Ok(EhParams {
            rho: T::of(repr.rho),
            r: T::of(repr.r),
            a2: T::of(repr.a2),
            a3: T::of(repr.a3),
            value: T::of(repr.value),
        })
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma must be finite and above one, got {gamma}"
        )));
    }
    Ok(())
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if !(sigma > T::zero() && sigma < T::one()) {
        return Err(Error::Domain(format!(
            "sigma must lie strictly inside (0, 1), got {sigma}"
        )));
    }
    Ok(())
}

/// Lower bound on the modulus of the rescaling point `beta_gamma`:
/// `exp(-1/(g-1) + 1/(2(g^2-1)) - 1/(3(g^3-1)))`.
///
/// Underflows gracefully toward zero as `gamma` approaches one from above.
pub fn beta_lower_e<T: Real>(gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let one = T::one();
    let half = T::of(0.5);
    let third = T::of(1.0 / 3.0);
    let g2 = gamma * gamma;
    let g3 = g2 * gamma;
    let log = -(one / (gamma - one)) + half / (g2 - one) - third / (g3 - one);
    Ok(log.exp())
}

/// Rigorous lower bound on `1 / prod_{j>=1} (1 + gamma^{-j})`: the log-product
/// is truncated once `gamma^{-j} < tol` and its remainder is over-counted by
/// the geometric tail `gamma^{-J}/(gamma - 1)`, keeping the result a true
/// lower bound.
pub fn product_radius<T: Real>(gamma: T, tol: T) -> Result<T> {
    check_gamma(gamma)?;
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "truncation tolerance must be positive, got {tol}"
        )));
    }
    let ratio = T::one() / gamma;
    let mut term = ratio;
    let mut log_sum = T::zero();
    while term >= tol {
        log_sum += term.ln_1p();
        // The result underflows to zero anyway; stop accumulating so that
        // gamma barely above one terminates quickly.
        if log_sum > T::of(800.0) {
            return Ok(T::zero());
        }
        term = term * ratio;
    }
    let tail = term * gamma / (gamma - T::one());
    Ok((-(log_sum + tail)).exp())
}

/// One-variable Bloch lower bound, first form: keeps the explicit `1/gamma`
/// factor from bounding the image derivative by the Maximum Principle.
pub fn bloch_bound_v1<T: Real>(gamma: T, sigma: T) -> Result<T> {
    check_gamma(gamma)?;
    check_sigma(sigma)?;
    let one = T::one();
    let half = T::of(0.5);
    Ok(half * (sigma + one) * ((one - sigma) / (one - sigma + gamma)) / gamma * beta_lower_e(gamma)?)
}

/// One-variable Bloch lower bound, second form: the sharper branch without
/// the `1/gamma` factor. Identically `gamma` times [`bloch_bound_v1`].
pub fn bloch_bound_v2<T: Real>(gamma: T, sigma: T) -> Result<T> {
    Ok(bloch_bound_v1(gamma, sigma)? * gamma)
}

/// Scans a rectangle on an `nx` by `ny` grid in ascending order, keeping the
/// strictly best finite value; ties therefore resolve to the lexicographically
/// smallest point.
fn scan_rect<T: Real>(
    f: &impl Fn(T, T) -> Option<T>,
    best: &mut Option<(T, T, T)>,
    x_range: (T, T),
    y_range: (T, T),
    nx: usize,
    ny: usize,
) {
    let lerp = |lo: T, hi: T, i: usize, n: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * T::of_usize(i) / T::of_usize(n - 1)
        }
    };
    for i in 0..nx {
        let x = lerp(x_range.0, x_range.1, i, nx);
        for j in 0..ny {
            let y = lerp(y_range.0, y_range.1, j, ny);
            if let Some(v) = f(x, y) {
                if v.is_finite() && best.map_or(true, |(bv, _, _)| v > bv) {
                    *best = Some((v, x, y));
                }
            }
        }
    }
}

/// Coarse scan plus [`REFINE_ROUNDS`] rounds of 10x local refinement around
/// the incumbent, clamped to the original box. Returns `(value, x, y)`.
fn grid_max<T: Real>(
    f: &impl Fn(T, T) -> Option<T>,
    x_range: (T, T),
    y_range: (T, T),
    n: usize,
) -> Option<(T, T, T)> {
    let mut best = None;
    scan_rect(f, &mut best, x_range, y_range, n, n);
    best?;
    let denom = T::of_usize(n.max(2) - 1);
    let mut dx = (x_range.1 - x_range.0) / denom;
    let mut dy = (y_range.1 - y_range.0) / denom;
    let ten = T::of(10.0);
    for _ in 0..REFINE_ROUNDS {
        let (_, cx, cy) = best.expect("seeded by coarse scan");
        let sub_x = ((cx - dx).max(x_range.0), (cx + dx).min(x_range.1));
        let sub_y = ((cy - dy).max(y_range.0), (cy + dy).min(y_range.1));
        scan_rect(f, &mut best, sub_x, sub_y, REFINE_GRID, REFINE_GRID);
        dx = dx / ten;
        dy = dy / ten;
    }
    best
}

/// Maximizes a two-parameter bound over a box: deterministic 201x201 coarse
/// scan plus three rounds of local 10x refinement. Non-finite values are
/// skipped; ties resolve to the lexicographically smallest parameters.
pub fn optimize_2d<T: Real>(
    f: impl Fn(T, T) -> T,
    gamma_range: (T, T),
    sigma_range: (T, T),
) -> Result<BoundParams<T>> {
    for (lo, hi) in [gamma_range, sigma_range] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Domain(format!(
                "optimizer box must be finite and ordered, got [{lo}, {hi}]"
            )));
        }
    }
    let wrapped = |x: T, y: T| {
        let v = f(x, y);
        v.is_finite().then_some(v)
    };
    let (value, gamma, sigma) = grid_max(&wrapped, gamma_range, sigma_range, OPT_GRID)
        .ok_or_else(|| Error::SearchFailure("bound is non-finite on the whole box".into()))?;
    Ok(BoundParams { gamma, sigma, value })
}

/// [`optimize_2d`] applied to [`bloch_bound_v1`] over the default box.
pub fn optimize_bloch_v1<T: Real>() -> BoundParams<T> {
    optimize_default(|g, s| bloch_bound_v1(g, s))
}

/// [`optimize_2d`] applied to [`bloch_bound_v2`] over the default box.
pub fn optimize_bloch_v2<T: Real>() -> BoundParams<T> {
    optimize_default(|g, s| bloch_bound_v2(g, s))
}

fn optimize_default<T: Real>(f: impl Fn(T, T) -> Result<T>) -> BoundParams<T> {
    optimize_2d(
        |g, s| f(g, s).unwrap_or(T::nan()),
        (T::of(DEFAULT_GAMMA_RANGE.0), T::of(DEFAULT_GAMMA_RANGE.1)),
        (T::of(DEFAULT_SIGMA_RANGE.0), T::of(DEFAULT_SIGMA_RANGE.1)),
    )
    .expect("default box is finite and feasible")
}

/// Largest third-coefficient modulus compatible with the Landau coefficient
/// inequality: `(1/r^2) sqrt(max((2-r^2)/(1-r^2)^2 - a2^2 r^2, 0))`.
pub fn a3_cap<T: Real>(r: T, a2: T) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::Domain(format!("r must lie in (0, 1), got {r}")));
    }
    if !(a2 >= T::zero() && a2 <= T::one()) {
        return Err(Error::Domain(format!("a2 must lie in [0, 1], got {a2}")));
    }
    let r2 = r * r;
    let one = T::one();
    let radicand = (T::of(2.0) - r2) / ((one - r2) * (one - r2)) - a2 * a2 * r2;
    Ok(radicand.max(T::zero()).sqrt() / r2)
}

/// Slack added to the `a3` feasibility cap so that boundary points produced
/// by the cap itself are not rejected for rounding.
const A3_SLACK: f64 = 1e-12;

/// The Landau penalty that must be subtracted from `rho` to obtain a
/// schlicht radius: cubic and quartic coefficient terms plus a geometric
/// bound on the order-five tail.
///
/// The tail radicand uses `a3^2 r^4` (the coefficient inequality form, with
/// the square); the clamp at zero covers roundoff at the feasibility
/// boundary.
pub fn eh_penalty<T: Real>(rho: T, r: T, a2: T, a3: T) -> Result<T> {
    if !(rho > T::zero() && rho < r) {
        return Err(Error::Domain(format!(
            "need 0 < rho < r for the tail series, got rho = {rho}, r = {r}"
        )));
    }
    let cap = a3_cap(r, a2)?;
    if !(a3 >= T::zero()) || a3 > cap + T::of(A3_SLACK) {
        return Err(Error::Domain(format!(
            "a3 must lie in [0, {cap}], got {a3}"
        )));
    }
    let one = T::one();
    let r2 = r * r;
    let radicand =
        (T::of(2.0) - r2) / ((one - r2) * (one - r2)) - a2 * a2 * r2 - a3 * a3 * r2 * r2;
    let u = rho / r;
    let tail = r2 / T::of(5.0) * radicand.max(T::zero()).sqrt() * u.powi(5) / (one - u);
    Ok(a2 / T::of(3.0) * rho.powi(3) + a3 / T::of(4.0) * rho.powi(4) + tail)
}

/// Maximizes [`eh_penalty`] over the feasible coefficient region on a
/// 401x401 grid (infeasible points skipped) with local refinement, and
/// returns `rho` minus that worst-case penalty.
pub fn eh_bound<T: Real>(rho: T, r: T) -> Result<EhParams<T>> {
    if !(rho > T::zero() && rho < r && r < T::one()) {
        return Err(Error::Domain(format!(
            "need 0 < rho < r < 1, got rho = {rho}, r = {r}"
        )));
    }
    let a3_hi = a3_cap(r, T::zero())?;
    let eval = |a2: T, a3: T| -> Option<T> {
        if !(T::zero()..=T::one()).contains(&a2) {
            return None;
        }
        let cap = a3_cap(r, a2).ok()?;
        if a3 < T::zero() || a3 > cap {
            return None;
        }
        eh_penalty(rho, r, a2, a3).ok()
    };
    let (penalty, a2, a3) = grid_max(&eval, (T::zero(), T::one()), (T::zero(), a3_hi), EH_GRID)
        .expect("the a3 = 0 row is always feasible");
    Ok(EhParams {
        rho,
        r,
        a2,
        a3,
        value: rho - penalty,
    })
}

fn check_wu_args<T: Real>(m: u32, k: T, gamma: T, sigma: T) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("dimension m must be at least one".into()));
    }
    if !(k >= T::one()) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "quasiconformality constant K must be at least one, got {k}"
        )));
    }
    check_gamma(gamma)?;
    check_sigma(sigma)
}

fn wu_prefactor<T: Real>(m: u32, sigma: T) -> T {
    sigma * (T::one() - sigma) / ((T::of(2.0) - sigma) * T::of(2.0).powi(m as i32))
}

/// Schlicht-ball lower bound for a K-mapping in dimension `m`:
/// `sigma(1-sigma)/((2-sigma) 2^m) K^{-(3m-1)/2} beta_lower_e(gamma)/gamma`.
pub fn wu_bound<T: Real>(m: u32, k: T, gamma: T, sigma: T) -> Result<T> {
    check_wu_args(m, k, gamma, sigma)?;
    let exponent = T::of_usize(3 * m as usize - 1) / T::of(2.0);
    Ok(wu_prefactor(m, sigma) * k.powf(-exponent) * beta_lower_e(gamma)? / gamma)
}

/// The two intermediate K-mapping bounds before the determinant is
/// eliminated: branch one grows with `det F'` and branch two decays with it.
/// They cross exactly where `det^{1/m} = gamma K^{(m-1)/2}`, and the better
/// of the two always dominates [`wu_bound`].
pub fn wu_branch_bounds<T: Real>(
    m: u32,
    k: T,
    gamma: T,
    sigma: T,
    det_f_at_beta: T,
) -> Result<(T, T)> {
    check_wu_args(m, k, gamma, sigma)?;
    if !(det_f_at_beta >= T::one()) || !det_f_at_beta.is_finite() {
        return Err(Error::Domain(format!(
            "|det F'| at the rescaling point must be at least one, got {det_f_at_beta}"
        )));
    }
    let p = wu_prefactor(m, sigma) * beta_lower_e(gamma)?;
    let det_root = det_f_at_beta.powf(T::one() / T::of_usize(m as usize));
    let branch1 = p * det_root / (k.powi(2 * m as i32 - 1) * gamma * gamma);
    let branch2 = p / (k.powi(m as i32) * det_root);
    Ok((branch1, branch2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_tends_to_one_for_large_gamma() {
        let v: f64 = beta_lower_e(1e6).unwrap();
        assert!((v - 1.0).abs() < 2e-6);
    }

    #[test]
    fn beta_underflows_near_one_without_error() {
        let v: f64 = beta_lower_e(1.0 + 1e-9).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn beta_rejects_bad_gamma() {
        for g in [1.0_f64, 0.5, -2.0, f64::NAN, f64::INFINITY] {
            assert!(beta_lower_e(g).is_err(), "gamma = {g}");
        }
    }

    #[test]
    fn beta_frozen_values() {
        let cases = [
            (1.5, 0.175458825315),
            (2.0, 0.414388068388),
            (3.0, 0.637423816372),
            (5.0, 0.793061236744),
            (10.0, 0.899070099066),
        ];
        for (g, want) in cases {
            let got: f64 = beta_lower_e(g).unwrap();
            assert!((got - want).abs() < 1e-11, "E({g}) = {got}, want {want}");
        }
    }

    #[test]
    fn product_radius_frozen_values_and_dominance() {
        let cases = [
            (1.5, 0.182907616505),
            (2.0, 0.419422441795),
            (3.0, 0.639004576637),
            (5.0, 0.793335470058),
            (10.0, 0.899090918183),
        ];
        for (g, want) in cases {
            let got: f64 = product_radius(g, 1e-16).unwrap();
            assert!((got - want).abs() < 1e-11, "radius({g}) = {got}");
            assert!(got >= beta_lower_e(g).unwrap());
        }
    }

    #[test]
    fn product_radius_large_gamma_dominant_term() {
        let v: f64 = product_radius(1e5, 1e-16).unwrap();
        assert!(v >= 0.9999);
        assert!(v <= 1.0);
    }

    #[test]
    fn product_radius_underflows_near_one() {
        let v: f64 = product_radius(1.0 + 1e-10, 1e-16).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn v2_is_gamma_times_v1() {
        for (g, s) in [(1.3, 0.2), (2.0, 0.5), (7.5, 0.9)] {
            let v1: f64 = bloch_bound_v1(g, s).unwrap();
            let v2: f64 = bloch_bound_v2(g, s).unwrap();
            assert!((v2 - g * v1).abs() <= 1e-15 * v2.abs());
            assert!(v2 >= v1);
        }
    }

    #[test]
    fn v1_matches_factor_by_factor() {
        let e2: f64 = beta_lower_e(2.0).unwrap();
        let direct = (0.5 + 1.0) / 2.0 * ((1.0 - 0.5) / (1.0 - 0.5 + 2.0)) * (1.0 / 2.0) * e2;
        let got = bloch_bound_v1(2.0, 0.5).unwrap();
        assert!((got - direct).abs() < 1e-15);
    }

    #[test]
    fn v1_vanishes_toward_sigma_one() {
        let v: f64 = bloch_bound_v1(2.0, 1.0 - 1e-12).unwrap();
        assert!(v.abs() < 1e-11);
        assert!(bloch_bound_v1(2.0, 1.0).is_err());
        assert!(bloch_bound_v1(2.0, 0.0).is_err());
    }

    #[test]
    fn optimizer_recovers_paraboloid_peak() {
        let f = |x: f64, y: f64| -(x - 0.3).powi(2) - (y + 0.2).powi(2);
        let best = optimize_2d(f, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        assert!((best.gamma - 0.3).abs() <= 2e-5);
        assert!((best.sigma + 0.2).abs() <= 2e-5);
        assert!(best.value >= -1e-9);
    }

    #[test]
    fn optimizer_reproduces_headline_bounds() {
        let v1: BoundParams<f64> = optimize_bloch_v1();
        assert!((v1.value - 0.0355493).abs() < 1e-4);
        assert!(v1.value > 1.0 / 29.0);
        let v2: BoundParams<f64> = optimize_bloch_v2();
        assert!((v2.value - 0.0813782).abs() < 1e-4);
        assert!(v2.value > 1.0 / 13.0);
    }

    #[test]
    fn optimizer_frozen_argmax() {
        let v1: BoundParams<f64> = optimize_bloch_v1();
        assert!((v1.gamma - 2.004501).abs() < 1e-3);
        assert!((v1.sigma - 0.171301).abs() < 1e-3);
        let v2: BoundParams<f64> = optimize_bloch_v2();
        assert!((v2.gamma - 2.772576).abs() < 1e-3);
        assert!((v2.sigma - 0.134951).abs() < 1e-3);
    }

    #[test]
    fn a3_cap_matches_hand_computation() {
        let cap: f64 = a3_cap(0.8, 1.0).unwrap();
        assert!((cap - 4.9053).abs() < 1e-3);
        assert!((cap - 4.904813).abs() < 1e-5);
    }

    #[test]
    fn a3_cap_decreases_in_a2() {
        let c0: f64 = a3_cap(0.8, 0.0).unwrap();
        let c5: f64 = a3_cap(0.8, 0.5).unwrap();
        let c1: f64 = a3_cap(0.8, 1.0).unwrap();
        assert!(c0 > c5 && c5 > c1);
    }

    #[test]
    fn a3_cap_rejects_bad_arguments() {
        assert!(a3_cap(0.0, 0.5).is_err());
        assert!(a3_cap(1.0, 0.5).is_err());
        assert!(a3_cap(0.8, -0.1).is_err());
        assert!(a3_cap(0.8, 1.1).is_err());
    }

    #[test]
    fn penalty_direct_evaluation_at_zero_coefficients() {
        let p: f64 = eh_penalty(0.45, 0.8, 0.0, 0.0).unwrap();
        assert!((p - 0.05338).abs() < 5e-5);
    }

    #[test]
    fn penalty_vanishes_with_rho() {
        let p: f64 = eh_penalty(1e-6, 0.8, 0.5, 1.0).unwrap();
        assert!(p < 1e-15);
    }

    #[test]
    fn penalty_is_finite_at_the_feasibility_boundary() {
        // At a3 = a3_cap the tail radicand cancels to roundoff; the clamp
        // keeps the square root real.
        let cap: f64 = a3_cap(0.8, 1.0).unwrap();
        let p = eh_penalty(0.45, 0.8, 1.0, cap).unwrap();
        assert!(p.is_finite() && p > 0.0);
    }

    #[test]
    fn penalty_rejects_infeasible_points() {
        assert!(eh_penalty(0.8, 0.45, 0.5, 1.0).is_err());
        assert!(eh_penalty(0.45, 0.8, 1.5, 1.0).is_err());
        let cap: f64 = a3_cap(0.8, 1.0).unwrap();
        assert!(eh_penalty(0.45, 0.8, 1.0, cap + 1e-6).is_err());
    }

    #[test]
    fn eh_bound_reproduces_headline_value() {
        let best: EhParams<f64> = eh_bound(0.45, 0.8).unwrap();
        assert!((best.value - 0.347493).abs() < 1e-3);
        assert!((best.value - 0.3474925).abs() < 1e-6);
        assert!((best.a2 - 1.0).abs() < 1e-6);
        assert!((best.a3 - 3.419041).abs() < 1e-3);
        assert!(best.value < best.rho);
    }

    #[test]
    fn wu_bound_m1_reduction() {
        let g = 2.5_f64;
        let s = 0.4_f64;
        let direct = s * (1.0 - s) / (2.0 * (2.0 - s)) * beta_lower_e(g).unwrap() / g;
        let got = wu_bound(1, 1.0, g, s).unwrap();
        assert!((got - direct).abs() < 1e-15);
    }

    #[test]
    fn wu_bound_scaling_law() {
        for m in 1..=3u32 {
            for k in [1.0_f64, 1.7, 3.0] {
                let a = wu_bound(m, 4.0 * k, 2.0, 0.5).unwrap();
                let b = wu_bound(m, k, 2.0, 0.5).unwrap();
                let want = 4.0_f64.powf(-((3 * m) as f64 - 1.0) / 2.0);
                assert!((a / b - want).abs() < 1e-12 * want);
            }
        }
    }

    #[test]
    fn wu_bound_rejects_bad_arguments() {
        assert!(wu_bound(0, 1.0, 2.0, 0.5).is_err());
        assert!(wu_bound(2, 0.9, 2.0, 0.5).is_err());
        assert!(wu_bound(2, 1.0, 1.0, 0.5).is_err());
        assert!(wu_bound(2, 1.0, 2.0, 0.0).is_err());
        assert!(wu_bound(2, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn branches_agree_at_the_crossover() {
        let (m, k, g, s) = (2u32, 2.0_f64, 1.7_f64, 0.45_f64);
        let det = (g * k.sqrt()).powi(m as i32);
        let (b1, b2) = wu_branch_bounds(m, k, g, s, det).unwrap();
        assert!((b1 - b2).abs() < 1e-12 * b1);
        let wu = wu_bound(m, k, g, s).unwrap();
        assert!((b1 - wu).abs() < 1e-12 * wu);
    }

    #[test]
    fn better_branch_dominates_wu_bound() {
        // Away from the crossover one branch falls below the final bound and
        // the other rises above it; the maximum is the usable estimate.
        let (m, k, g, s) = (2u32, 2.0_f64, 3.0_f64, 0.4_f64);
        let wu = wu_bound(m, k, g, s).unwrap();
        let (b1, b2) = wu_branch_bounds(m, k, g, s, 1.0).unwrap();
        assert!(b1.min(b2) < wu);
        assert!(b1.max(b2) >= wu * (1.0 - 1e-12));
    }

    #[test]
    fn branch_rejects_small_determinant() {
        assert!(wu_branch_bounds(2, 2.0, 3.0, 0.4, 0.5).is_err());
    }

    #[test]
    fn params_serialize_round_trip() {
        let p = BoundParams {
            gamma: 2.0_f64,
            sigma: 0.5,
            value: 0.1,
        };
        let back: BoundParams<f64> =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
        let e = eh_bound(0.45_f64, 0.8).unwrap();
        let back: EhParams<f64> = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(e, back);
    }
}
