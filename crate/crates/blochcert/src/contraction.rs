//! Fixed-point machinery for schlicht-disk certification: building the maps
//! g_w whose fixed points solve f(z) = w, certifying disks, solving by plain
//! iteration, and empirically verifying emitted certificates.

use std::cmp::Ordering;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Real};
use crate::series::{max_modulus_circle, Poly};

/// Modulus threshold below which a derivative counts as zero.
pub const DERIVATIVE_THRESHOLD: f64 = 1e-12;

/// Default fixed-point iteration tolerance.
pub const SOLVE_TOL: f64 = 1e-12;

/// Default fixed-point iteration budget.
pub const SOLVE_MAX_ITER: usize = 100_000;

/// Residual bound a verified sample must meet.
pub const VERIFY_RESIDUAL_TOL: f64 = 1e-9;

/// Relative slack on the domain radius before an iterate counts as escaped.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Which fixed-point argument backs a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertKind {
    /// Self-map with derivative bound below one: Banach iteration at a
    /// guaranteed geometric rate.
    BanachContraction,
    /// Strict self-map of a bounded disk: unique fixed point with no rate
    /// guarantee.
    EarleHamiltonMapping,
}

/// A certified schlicht disk: the map restricted to the domain disk covers
/// the image disk injectively.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationResult<T: Real> {
    /// Expansion center in the domain.
    pub center_b: Complex<T>,
    /// Domain disk radius about `center_b`.
    pub domain_radius_rho: T,
    /// Image disk center, `f(center_b)`.
    pub image_center: Complex<T>,
    /// Certified image disk radius.
    pub schlicht_radius: T,
    /// Fixed-point argument backing the certificate.
    pub kind: CertKind,
    /// Bound on |g_w'| over the domain disk (below one for Banach kind).
    pub contraction_factor: T,
    /// Whether the domain disk lies inside the unit disk (reported, not
    /// enforced).
    pub domain_in_unit_disk: bool,
}

#[derive(Serialize, Deserialize)]
struct CertRepr {
    center_b: [f64; 2],
    domain_radius_rho: f64,
    image_center: [f64; 2],
    schlicht_radius: f64,
    kind: CertKind,
    contraction_factor: f64,
    domain_in_unit_disk: bool,
}

impl<T: Real> Serialize for CertificationResult<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |c: Complex<T>| {
            [
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            ]
        };
        CertRepr {
            center_b: pair(self.center_b),
            domain_radius_rho: self.domain_radius_rho.to_f64().unwrap_or(f64::NAN),
            image_center: pair(self.image_center),
            schlicht_radius: self.schlicht_radius.to_f64().unwrap_or(f64::NAN),
            kind: self.kind,
            contraction_factor: self.contraction_factor.to_f64().unwrap_or(f64::NAN),
            domain_in_unit_disk: self.domain_in_unit_disk,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for CertificationResult<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CertRepr::deserialize(deserializer)?;
        let lift = |p: [f64; 2]| Complex::new(T::of(p[0]), T::of(p[1]));
        Ok(CertificationResult {
            center_b: lift(repr.center_b),
            domain_radius_rho: T::of(repr.domain_radius_rho),
            image_center: lift(repr.image_center),
            schlicht_radius: T::of(repr.schlicht_radius),
            kind: repr.kind,
            contraction_factor: T::of(repr.contraction_factor),
            domain_in_unit_disk: repr.domain_in_unit_disk,
        })
    }
}

/// The map `g_w(z) = b + (w - f(b))/f'(b) - sum_{k>=2} c_k/f'(b) (z-b)^k`
/// whose fixed points satisfy `f(z) = w` exactly.
#[derive(Debug, Clone)]
pub struct FixedPointMap<T: Real> {
    base: Complex<T>,
    tail: Poly<T>,
}

impl<T: Real> FixedPointMap<T> {
    /// Applies one iteration step.
    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        self.base - self.tail.eval(z)
    }
}

/// Builds the fixed-point map for `f(z) = w` expanded about `b`.
pub fn fixed_point_map<T: Real>(p: &Poly<T>, b: Complex<T>, w: Complex<T>) -> Result<FixedPointMap<T>> {
    if !is_finite_c(b) || !is_finite_c(w) {
        return Err(Error::NonFinite("fixed-point map arguments".into()));
    }
    let q = p.taylor_shift(b);
    let (fb, fpb) = normalization_data(&q)?;
    Ok(fixed_point_map_from(&q, b, w, fb, fpb))
}

fn fixed_point_map_from<T: Real>(
    q: &Poly<T>,
    b: Complex<T>,
    w: Complex<T>,
    fb: Complex<T>,
    fpb: Complex<T>,
) -> FixedPointMap<T> {
    let mut coeffs: Vec<Complex<T>> = q.coeffs().to_vec();
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k < 2 {
            *c = Complex::default();
        } else {
            *c = *c / fpb;
        }
    }
    let tail = Poly::new(b, coeffs).expect("finite shifted coefficients");
    FixedPointMap {
        base: b + (w - fb) / fpb,
        tail,
    }
}

fn normalization_data<T: Real>(q: &Poly<T>) -> Result<(Complex<T>, Complex<T>)> {
    let fpb = q.coeff(1);
    let threshold = T::of(DERIVATIVE_THRESHOLD);
    if fpb.norm() < threshold {
        return Err(Error::DegenerateCenter {
            modulus: fpb.norm().to_f64().unwrap_or(f64::NAN),
            threshold: DERIVATIVE_THRESHOLD,
        });
    }
    Ok((q.coeff(0), fpb))
}

fn check_radius<T: Real>(rho: T) -> Result<()> {
    if !rho.is_finite() || rho <= T::zero() {
        return Err(Error::Domain(format!(
            "domain radius must be positive and finite, got {rho}"
        )));
    }
    Ok(())
}

/// Certifies the schlicht disk obtained by expanding `p` about `b` on the
/// disk of radius `rho`: image radius `|f'(b)| rho - max |F2|` with `F2` the
/// order-two Taylor remainder.
pub fn certify_schlicht<T: Real>(p: &Poly<T>, b: Complex<T>, rho: T) -> Result<CertificationResult<T>> {
    certify_schlicht_opts(p, b, rho, false)
}

/// [`certify_schlicht`] with an optional upgrade to the Banach kind when the
/// derivative bound allows it (contraction factor below one); otherwise the
/// certificate stays mapping-kind.
pub fn certify_schlicht_opts<T: Real>(
    p: &Poly<T>,
    b: Complex<T>,
    rho: T,
    banach_upgrade: bool,
) -> Result<CertificationResult<T>> {
    check_radius(rho)?;
    if !is_finite_c(b) {
        return Err(Error::NonFinite("expansion center".into()));
    }
    let q = p.taylor_shift(b);
    let (fb, fpb) = normalization_data(&q)?;
    let remainder = q.tail(2);
    let m2 = max_modulus_circle(&remainder, b, rho)?;
    let schlicht_radius = (fpb.norm() * rho - m2).max(T::zero());
    let contraction_factor = max_modulus_circle(&remainder.derivative(), b, rho)? / fpb.norm();
    let kind = if banach_upgrade && contraction_factor < T::one() {
        CertKind::BanachContraction
    } else {
        CertKind::EarleHamiltonMapping
    };
    Ok(CertificationResult {
        center_b: b,
        domain_radius_rho: rho,
        image_center: fb,
        schlicht_radius,
        kind,
        contraction_factor,
        domain_in_unit_disk: b.norm() + rho <= T::one(),
    })
}

/// Certifies a schlicht disk about the origin for a normalized polynomial
/// (`p(0) = 0`, `p'(0) = 1`) via the triangle bound
/// `rho - sum_{k>=2} |c_k| rho^k`.
pub fn certify_origin<T: Real>(p: &Poly<T>, rho: T) -> Result<CertificationResult<T>> {
    check_radius(rho)?;
    let q = recentered_normalized(p)?;
    let mut penalty = T::zero();
    let mut slope = T::zero();
    let mut pw = rho;
    for k in 2..=q.degree() {
        let a = q.coeff(k).norm();
        slope = slope + T::of_usize(k) * a * pw;
        pw = pw * rho;
        penalty = penalty + a * pw;
    }
    Ok(CertificationResult {
        center_b: Complex::default(),
        domain_radius_rho: rho,
        image_center: q.coeff(0),
        schlicht_radius: (rho - penalty).max(T::zero()),
        kind: CertKind::EarleHamiltonMapping,
        contraction_factor: slope,
        domain_in_unit_disk: rho <= T::one(),
    })
}

fn recentered_normalized<T: Real>(p: &Poly<T>) -> Result<Poly<T>> {
    let q = if p.center() == Complex::default() {
        p.clone()
    } else {
        p.taylor_shift(Complex::default())
    };
    let at_zero = q.coeff(0).norm();
    let defect = (q.coeff(1) - Complex::new(T::one(), T::zero())).norm();
    let tol = T::of(DERIVATIVE_THRESHOLD);
    if at_zero > tol || defect > tol {
        return Err(Error::NotNormalized {
            at_zero: at_zero.to_f64().unwrap_or(f64::NAN),
            derivative_defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(q)
}

/// Runs plain fixed-point iteration of `g` inside the closed disk around
/// `domain_center`, returning an iterate whose step (hence fixed-point
/// residual) is at most `tol`.
pub fn banach_solve<T: Real>(
    g: impl Fn(Complex<T>) -> Complex<T>,
    start: Complex<T>,
    domain_center: Complex<T>,
    domain_radius: T,
    tol: T,
    max_iter: usize,
) -> Result<Complex<T>> {
    banach_solve_steps(g, start, domain_center, domain_radius, tol, max_iter).map(|(z, _)| z)
}

/// [`banach_solve`] also reporting how many applications of `g` were used.
pub fn banach_solve_steps<T: Real>(
    g: impl Fn(Complex<T>) -> Complex<T>,
    start: Complex<T>,
    domain_center: Complex<T>,
    domain_radius: T,
    tol: T,
    max_iter: usize,
) -> Result<(Complex<T>, usize)> {
    if !tol.is_finite() || tol <= T::zero() {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    check_radius(domain_radius)?;
    if !is_finite_c(start) || !is_finite_c(domain_center) {
        return Err(Error::NonFinite("iteration start or domain center".into()));
    }
    let limit = domain_radius * (T::one() + T::of(DOMAIN_SLACK));
    let distance = (start - domain_center).norm();
    if distance > limit {
        return Err(Error::DomainEscape {
            distance: distance.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut z = start;
    let mut last_step = T::infinity();
    for it in 1..=max_iter {
        let zn = g(z);
        if !is_finite_c(zn) {
            return Err(Error::NonFinite("fixed-point iterate".into()));
        }
        let step = (zn - z).norm();
        if step <= tol {
            return Ok((z, it));
        }
        let distance = (zn - domain_center).norm();
        if distance > limit {
            return Err(Error::DomainEscape {
                distance: distance.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
        z = zn;
        last_step = step;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_step: last_step.to_f64().unwrap_or(f64::NAN),
    })
}

/// Outcome counts of an empirical schlicht-disk verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Number of sampled image points.
    pub n_samples: usize,
    /// Samples that solved with residual within tolerance.
    pub passed: usize,
    /// Samples that failed (solver error or residual above tolerance).
    pub failed: usize,
    /// Samples where the iteration escaped, diverged, or hit the budget.
    pub solver_failures: usize,
    /// Samples whose solution had residual above tolerance.
    pub residual_failures: usize,
    /// Pairs of well-separated image points mapped to coincident preimages.
    pub injectivity_collisions: usize,
    /// Largest residual among solved samples.
    pub worst_residual: f64,
}

impl VerifyReport {
    /// True when every sample passed and no collision was found.
    pub fn is_clean(&self) -> bool {
        self.failed == 0 && self.injectivity_collisions == 0
    }
}

/// Empirically verifies a certificate: solves `p(z) = w` for quasi-uniform
/// samples `w` in the open image disk, checks residuals, and checks that
/// well-separated samples get well-separated preimages.
pub fn verify_schlicht_disk<T: Real>(
    p: &Poly<T>,
    cert: &CertificationResult<T>,
    n_samples: usize,
) -> Result<VerifyReport> {
    if !(cert.schlicht_radius > T::zero()) {
        return Err(Error::Domain(
            "certificate has an empty schlicht disk".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let b = cert.center_b;
    let q = p.taylor_shift(b);
    let (fb, fpb) = normalization_data(&q)?;
    let tol = T::of(SOLVE_TOL);

    let golden_angle = T::of(std::f64::consts::PI * (3.0 - 5f64.sqrt()));
    let n_t = T::of_usize(n_samples);
    let mut solved: Vec<(Complex<T>, Complex<T>)> = Vec::with_capacity(n_samples);
    let mut solver_failures = 0usize;
    let mut residual_failures = 0usize;
    let mut worst_residual = 0f64;

    for i in 0..n_samples {
        let frac = ((T::of_usize(i) + T::of(0.5)) / n_t).sqrt();
        let w = cert.image_center
            + Complex::from_polar(cert.schlicht_radius * frac, T::of_usize(i) * golden_angle);
        let g = fixed_point_map_from(&q, b, w, fb, fpb);
        match banach_solve(
            |z| g.apply(z),
            b,
            b,
            cert.domain_radius_rho,
            tol,
            SOLVE_MAX_ITER,
        ) {
            Err(_) => solver_failures += 1,
            Ok(z) => {
                let residual = (q.eval(z) - w).norm().to_f64().unwrap_or(f64::NAN);
                if !(residual <= VERIFY_RESIDUAL_TOL) {
                    residual_failures += 1;
                } else {
                    worst_residual = worst_residual.max(residual);
                    solved.push((w, z));
                }
            }
        }
    }

    let injectivity_collisions = count_collisions(&mut solved);
    let failed = solver_failures + residual_failures;
    Ok(VerifyReport {
        n_samples,
        passed: n_samples - failed,
        failed,
        solver_failures,
        residual_failures,
        injectivity_collisions,
        worst_residual,
    })
}

/// Counts pairs with image separation at least 1e-6 whose preimages are
/// closer than 1e-9. Sorting by the real part keeps the scan near-linear.
fn count_collisions<T: Real>(solved: &mut [(Complex<T>, Complex<T>)]) -> usize {
    let z_tol = T::of(1e-9);
    let w_tol = T::of(1e-6);
    solved.sort_by(|a, b| a.1.re.partial_cmp(&b.1.re).unwrap_or(Ordering::Equal));
    let mut collisions = 0;
    for i in 0..solved.len() {
        for j in (i + 1)..solved.len() {
            if solved[j].1.re - solved[i].1.re > z_tol {
                break;
            }
            if (solved[j].1 - solved[i].1).norm() < z_tol
                && (solved[j].0 - solved[i].0).norm() >= w_tol
            {
                collisions += 1;
            }
        }
    }
    collisions
}

/// Grid-searches real centers `b` and radii `rho` for the certificate with
/// the largest schlicht radius, then refines once around the best cell at a
/// tenth of the coarse spacing. Deterministic: scanned in ascending order
/// with strict improvement, so ties resolve to the smallest `b`, then the
/// smallest `rho`.
pub fn search_center<T: Real>(
    p: &Poly<T>,
    b_range: (T, T),
    rho_range: (T, T),
    grid: (usize, usize),
) -> Result<CertificationResult<T>> {
    let one = T::one();
    if !(b_range.0 > -one && b_range.1 < one && b_range.0 <= b_range.1) {
        return Err(Error::Domain(format!(
            "center range must lie inside (-1, 1), got [{}, {}]",
            b_range.0, b_range.1
        )));
    }
    if !(rho_range.0 > T::zero() && rho_range.1 < T::of(2.0) && rho_range.0 <= rho_range.1) {
        return Err(Error::Domain(format!(
            "radius range must lie inside (0, 2), got [{}, {}]",
            rho_range.0, rho_range.1
        )));
    }
    if grid.0 == 0 || grid.1 == 0 {
        return Err(Error::Domain("grid dimensions must be positive".into()));
    }
    recentered_normalized(p)?;

    let radius_at = |b: T, rho: T| -> Option<(T, T, T)> {
        let center = Complex::new(b, T::zero());
        let q = p.taylor_shift(center);
        let fpb = q.coeff(1).norm();
        if fpb < T::of(DERIVATIVE_THRESHOLD) {
            return None;
        }
        let m2 = max_modulus_circle(&q.tail(2), center, rho).ok()?;
        Some(((fpb * rho - m2).max(T::zero()), b, rho))
    };

    let lerp = |lo: T, hi: T, i: usize, n: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * T::of_usize(i) / T::of_usize(n - 1)
        }
    };

    fn consider<T: Real>(best: &mut Option<(T, T, T)>, cand: Option<(T, T, T)>) {
        if let Some((value, b, rho)) = cand {
            if best.map_or(true, |(v, _, _)| value > v) {
                *best = Some((value, b, rho));
            }
        }
    }

    let mut best: Option<(T, T, T)> = None;
    for i in 0..grid.0 {
        let b = lerp(b_range.0, b_range.1, i, grid.0);
        for j in 0..grid.1 {
            let rho = lerp(rho_range.0, rho_range.1, j, grid.1);
            consider(&mut best, radius_at(b, rho));
        }
    }
    let (_, coarse_b, coarse_rho) = best.ok_or_else(|| {
        Error::SearchFailure("no feasible grid cell (all centers degenerate)".into())
    })?;

    let spacing = |lo: T, hi: T, n: usize| {
        if n <= 1 {
            T::zero()
        } else {
            (hi - lo) / T::of_usize(n - 1)
        }
    };
    let db = spacing(b_range.0, b_range.1, grid.0);
    let drho = spacing(rho_range.0, rho_range.1, grid.1);
    let b_lo = (coarse_b - db).max(b_range.0);
    let b_hi = (coarse_b + db).min(b_range.1);
    let r_lo = (coarse_rho - drho).max(rho_range.0);
    let r_hi = (coarse_rho + drho).min(rho_range.1);
    for i in 0..21 {
        let b = lerp(b_lo, b_hi, i, 21);
        for j in 0..21 {
            let rho = lerp(r_lo, r_hi, j, 21);
            consider(&mut best, radius_at(b, rho));
        }
    }

    let (_, best_b, best_rho) = best.expect("search seeded by coarse pass");
    certify_schlicht(p, Complex::new(best_b, T::zero()), best_rho)
}
