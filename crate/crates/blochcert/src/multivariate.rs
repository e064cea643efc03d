//! Polynomial maps of several complex variables: evaluation, Jacobian
//! singular-value statistics, K-mapping constant estimation, and schlicht
//! ball certification on polydisks.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    optimize_2d, wu_bound, BoundParams, DEFAULT_GAMMA_RANGE, DEFAULT_SIGMA_RANGE,
};
use crate::contraction::{CertKind, VerifyReport, SOLVE_MAX_ITER, SOLVE_TOL, VERIFY_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::{is_finite_c, Real};

/// Torus sample density per angular dimension used by the certifier.
pub const TORUS_ANGLES: usize = 16;

/// Largest dimension the combinatorial (torus-grid) operations accept.
pub const MAX_DIM: usize = 4;

/// Slack in the small-eigenvalue inequality check.
const EIGEN_SLACK: f64 = 1e-10;

/// A polynomial in several complex variables, stored as a sparse list of
/// `(multiindex, coefficient)` terms in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<T: Real> {
    vars: usize,
    terms: Vec<(Vec<u32>, Complex<T>)>,
}

impl<T: Real> MultiPoly<T> {
    /// Builds a polynomial in `vars` variables, merging duplicate
    /// multiindices and dropping exact-zero coefficients.
    pub fn new(vars: usize, terms: Vec<(Vec<u32>, Complex<T>)>) -> Result<Self> {
        if vars == 0 {
            return Err(Error::Domain("a polynomial needs at least one variable".into()));
        }
        let mut merged: BTreeMap<Vec<u32>, Complex<T>> = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != vars {
                return Err(Error::Domain(format!(
                    "multiindex length {} does not match {vars} variables",
                    k.len()
                )));
            }
            if !is_finite_c(c) {
                return Err(Error::NonFinite("polynomial coefficient".into()));
            }
            let entry = merged.entry(k).or_default();
            *entry = *entry + c;
        }
        merged.retain(|_, c| *c != Complex::default());
        Ok(MultiPoly {
            vars,
            terms: merged.into_iter().collect(),
        })
    }

    /// Number of variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// The sorted `(multiindex, coefficient)` terms.
    pub fn terms(&self) -> &[(Vec<u32>, Complex<T>)] {
        &self.terms
    }

    /// Total degree (zero for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(k, _)| k.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Evaluates at `z`; `z` must list one value per variable.
    pub fn eval(&self, z: &[Complex<T>]) -> Complex<T> {
        assert_eq!(z.len(), self.vars, "evaluation point has wrong dimension");
        let mut acc = Complex::default();
        for (k, c) in &self.terms {
            let mut term = *c;
            for (l, &exp) in k.iter().enumerate() {
                term = term * z[l].powu(exp);
            }
            acc = acc + term;
        }
        acc
    }

    /// Evaluates the analytic partial derivative with respect to variable
    /// `j` at `z`.
    fn partial_eval(&self, j: usize, z: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::default();
        for (k, c) in &self.terms {
            let kj = k[j];
            if kj == 0 {
                continue;
            }
            let mut term = *c * T::of_usize(kj as usize);
            for (l, &exp) in k.iter().enumerate() {
                let e = if l == j { exp - 1 } else { exp };
                term = term * z[l].powu(e);
            }
            acc = acc + term;
        }
        acc
    }

    /// Expands about `beta` via the multinomial theorem: the result, read in
    /// displacement coordinates `v`, equals `self` at `beta + v` exactly.
    fn recenter(&self, beta: &[Complex<T>]) -> MultiPoly<T> {
        let mut merged: BTreeMap<Vec<u32>, Complex<T>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, Complex<T>)> = vec![(Vec::new(), *c)];
            for (i, &ki) in k.iter().enumerate() {
                let mut next = Vec::with_capacity(partial.len() * (ki as usize + 1));
                for (idx, coef) in &partial {
                    for j in 0..=ki {
                        let mut idx2 = idx.clone();
                        idx2.push(j);
                        let scale = T::of(binomial(ki, j));
                        let c2 = *coef * scale * beta[i].powu(ki - j);
                        next.push((idx2, c2));
                    }
                }
                partial = next;
            }
            for (idx, coef) in partial {
                let entry = merged.entry(idx).or_default();
                *entry = *entry + coef;
            }
        }
        merged.retain(|_, c| *c != Complex::default());
        MultiPoly {
            vars: self.vars,
            terms: merged.into_iter().collect(),
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= n as u128 - i;
        den *= i + 1;
    }
    (num / den) as f64
}

/// A polynomial map from `C^m` to itself, one [`MultiPoly`] per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap<T: Real> {
    components: Vec<MultiPoly<T>>,
}

impl<T: Real> PolyMap<T> {
    /// Builds a map from its components; the dimension is the component
    /// count, and every component must use exactly that many variables.
    pub fn new(components: Vec<MultiPoly<T>>) -> Result<Self> {
        let m = components.len();
        if m == 0 {
            return Err(Error::Domain("a map needs at least one component".into()));
        }
        for comp in &components {
            if comp.vars() != m {
                return Err(Error::Domain(format!(
                    "component in {} variables inside a dimension-{m} map",
                    comp.vars()
                )));
            }
        }
        Ok(PolyMap { components })
    }

    /// The identity map on `C^m`.
    pub fn identity(m: usize) -> Self {
        let matrix = linalg::identity::<T>(m);
        PolyMap::linear(&matrix).expect("identity matrix is square and finite")
    }

    /// The linear map `z -> Az` for a square matrix `A`.
    pub fn linear(matrix: &[Vec<Complex<T>>]) -> Result<Self> {
        let m = matrix.len();
        let mut components = Vec::with_capacity(m);
        for row in matrix {
            if row.len() != m {
                return Err(Error::Domain("linear map needs a square matrix".into()));
            }
            let terms = row
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let mut k = vec![0u32; m];
                    k[j] = 1;
                    (k, c)
                })
                .collect();
            components.push(MultiPoly::new(m, terms)?);
        }
        PolyMap::new(components)
    }

    /// Dimension `m` of domain and range.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// The component polynomials.
    pub fn components(&self) -> &[MultiPoly<T>] {
        &self.components
    }

    /// Component-wise evaluation; `z` must have length [`Self::dim`].
    pub fn eval(&self, z: &[Complex<T>]) -> Vec<Complex<T>> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    /// The Jacobian matrix of analytic partial derivatives at `z`.
    pub fn jacobian(&self, z: &[Complex<T>]) -> Mat<T> {
        let m = self.dim();
        self.components
            .iter()
            .map(|comp| (0..m).map(|j| comp.partial_eval(j, z)).collect())
            .collect()
    }

    /// The map `v -> F(beta + v)`, expanded exactly about `beta`.
    pub fn recenter(&self, beta: &[Complex<T>]) -> Result<PolyMap<T>> {
        check_point(self, beta)?;
        Ok(PolyMap {
            components: self.components.iter().map(|c| c.recenter(beta)).collect(),
        })
    }

    /// Parses the JSON interchange form
    /// `{"m": int, "components": [{"terms": [{"k": [...], "c": [re, im]}]}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Serializes to the JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    k: Vec<u32>,
    c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    m: usize,
    components: Vec<ComponentRepr>,
}

impl<T: Real> Serialize for PolyMap<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            m: self.dim(),
            components: self
                .components
                .iter()
                .map(|comp| ComponentRepr {
                    terms: comp
                        .terms()
                        .iter()
                        .map(|(k, c)| TermRepr {
                            k: k.clone(),
                            c: [
                                c.re.to_f64().unwrap_or(f64::NAN),
                                c.im.to_f64().unwrap_or(f64::NAN),
                            ],
                        })
                        .collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for PolyMap<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MapRepr::deserialize(deserializer)?;
        if repr.components.len() != repr.m {
            return Err(serde::de::Error::custom(format!(
                "declared dimension {} but {} components",
                repr.m,
                repr.components.len()
            )));
        }
        let components = repr
            .components
            .into_iter()
            .map(|comp| {
                MultiPoly::new(
                    repr.m,
                    comp.terms
                        .into_iter()
                        .map(|t| (t.k, Complex::new(T::of(t.c[0]), T::of(t.c[1]))))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| serde::de::Error::custom(e.to_string()))?;
        PolyMap::new(components).map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}

fn check_point<T: Real>(map: &PolyMap<T>, z: &[Complex<T>]) -> Result<()> {
    if z.len() != map.dim() {
        return Err(Error::Domain(format!(
            "point has dimension {}, map has dimension {}",
            z.len(),
            map.dim()
        )));
    }
    if !z.iter().all(|c| is_finite_c(*c)) {
        return Err(Error::NonFinite("evaluation point".into()));
    }
    Ok(())
}

fn check_desk_dim(m: usize) -> Result<()> {
    if m > MAX_DIM {
        return Err(Error::Domain(format!(
            "torus-grid operations support dimension at most {MAX_DIM}, got {m}"
        )));
    }
    Ok(())
}

/// Component-wise evaluation of `map` at `z` with input validation.
pub fn eval_map<T: Real>(map: &PolyMap<T>, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    check_point(map, z)?;
    Ok(map.eval(z))
}

/// Singular-value data of a Jacobian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianStats<T: Real> {
    /// Where the Jacobian was evaluated.
    pub at_point: Vec<Complex<T>>,
    /// Smallest singular value.
    pub lambda_min: T,
    /// Largest singular value (operator norm).
    pub lambda_max: T,
    /// Modulus of the determinant.
    pub det_modulus: T,
    /// The K-mapping ratio `lambda_max / det^(1/m)`; infinite when the
    /// determinant vanishes (serialized as JSON null).
    pub wu_ratio: T,
    /// True when the Jacobian is singular at the point.
    pub degenerate: bool,
}

#[derive(Serialize, Deserialize)]
struct JacobianStatsRepr {
    at_point: Vec<[f64; 2]>,
    lambda_min: f64,
    lambda_max: f64,
    det_modulus: f64,
    wu_ratio: f64,
    degenerate: bool,
}

impl<T: Real> Serialize for JacobianStats<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        JacobianStatsRepr {
            at_point: self
                .at_point
                .iter()
                .map(|c| {
                    [
                        c.re.to_f64().unwrap_or(f64::NAN),
                        c.im.to_f64().unwrap_or(f64::NAN),
                    ]
                })
                .collect(),
            lambda_min: self.lambda_min.to_f64().unwrap_or(f64::NAN),
            lambda_max: self.lambda_max.to_f64().unwrap_or(f64::NAN),
            det_modulus: self.det_modulus.to_f64().unwrap_or(f64::NAN),
            wu_ratio: self.wu_ratio.to_f64().unwrap_or(f64::INFINITY),
            degenerate: self.degenerate,
        }
        .serialize(serializer)
    }
}

/// Computes Jacobian singular values, determinant modulus, and the pointwise
/// K-mapping ratio at `z`. A singular Jacobian is reported (infinite ratio,
/// `degenerate` flag), never an error.
pub fn jacobian_stats<T: Real>(map: &PolyMap<T>, z: &[Complex<T>]) -> Result<JacobianStats<T>> {
    check_point(map, z)?;
    let jac = map.jacobian(z);
    let sv = linalg::singular_values(&jac);
    let lambda_max = sv.first().copied().unwrap_or_else(T::zero);
    let lambda_min = sv.last().copied().unwrap_or_else(T::zero);
    let det_modulus = linalg::det(&jac).norm();
    let m_inv = T::one() / T::of_usize(map.dim());
    let (wu_ratio, degenerate) = if det_modulus > T::zero() {
        let ratio = lambda_max / det_modulus.powf(m_inv);
        (ratio, !ratio.is_finite())
    } else {
        (T::infinity(), true)
    };
    Ok(JacobianStats {
        at_point: z.to_vec(),
        lambda_min,
        lambda_max,
        det_modulus,
        wu_ratio,
        degenerate,
    })
}

/// Visits every point of the torus `|v_l| = modulus` sampled at `n_angles`
/// per axis, in odometer order.
fn for_each_torus<T: Real>(m: usize, n_angles: usize, modulus: T, mut f: impl FnMut(&[Complex<T>])) {
    let tau = T::of(std::f64::consts::TAU);
    let n_t = T::of_usize(n_angles);
    let mut idx = vec![0usize; m];
    let mut v = vec![Complex::default(); m];
    loop {
        for l in 0..m {
            let theta = tau * T::of_usize(idx[l]) / n_t;
            v[l] = Complex::from_polar(modulus, theta);
        }
        f(&v);
        let mut l = 0;
        loop {
            idx[l] += 1;
            if idx[l] < n_angles {
                break;
            }
            idx[l] = 0;
            l += 1;
            if l == m {
                return;
            }
        }
    }
}

/// A sampled estimate of the K-mapping constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WuEstimate<T: Real> {
    /// Largest sampled ratio (a lower bound for the true constant);
    /// infinite when a degenerate point was hit.
    pub k: T,
    /// True when some sampled Jacobian was singular.
    pub degenerate: bool,
    /// Number of sampled points.
    pub samples: usize,
}

#[derive(Serialize, Deserialize)]
struct WuEstimateRepr {
    k: f64,
    degenerate: bool,
    samples: usize,
}

impl<T: Real> Serialize for WuEstimate<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WuEstimateRepr {
            k: self.k.to_f64().unwrap_or(f64::INFINITY),
            degenerate: self.degenerate,
            samples: self.samples,
        }
        .serialize(serializer)
    }
}

/// Estimates the K-mapping constant of `map` on the closed polydisk of the
/// given radius: the supremum of the pointwise ratio over the boundary torus,
/// interior tori at radius fractions 1/4, 1/2, 3/4, and the center.
pub fn estimate_wu_k<T: Real>(
    map: &PolyMap<T>,
    polydisk_radius: T,
    grid_per_axis: usize,
) -> Result<WuEstimate<T>> {
    if !(polydisk_radius > T::zero()) || !polydisk_radius.is_finite() {
        return Err(Error::Domain(format!(
            "polydisk radius must be positive and finite, got {polydisk_radius}"
        )));
    }
    if grid_per_axis == 0 {
        return Err(Error::Domain("grid_per_axis must be positive".into()));
    }
    let m = map.dim();
    check_desk_dim(m)?;
    let mut best = T::zero();
    let mut degenerate = false;
    let mut samples = 0usize;
    let mut visit = |v: &[Complex<T>]| {
        samples += 1;
        if degenerate {
            return;
        }
        let stats = jacobian_stats(map, v).expect("torus point is valid");
        if stats.degenerate {
            degenerate = true;
        } else if stats.wu_ratio > best {
            best = stats.wu_ratio;
        }
    };
    visit(&vec![Complex::default(); m]);
    for quarter in 1..=4usize {
        let modulus = polydisk_radius * T::of_usize(quarter) / T::of(4.0);
        for_each_torus(m, grid_per_axis, modulus, &mut visit);
    }
    Ok(WuEstimate {
        k: if degenerate { T::infinity() } else { best },
        degenerate,
        samples,
    })
}

/// Checks the small-eigenvalue inequality
/// `lambda_min >= K^-(m-1) det^(1/m)` (with roundoff slack) at `z`, given a
/// valid K-mapping constant for the map.
pub fn check_small_eigen<T: Real>(map: &PolyMap<T>, z: &[Complex<T>], k: T) -> Result<bool> {
    if !(k >= T::one()) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "K-mapping constant must be at least one, got {k}"
        )));
    }
    let stats = jacobian_stats(map, z)?;
    let m = map.dim();
    let rhs = k.powi(-(m as i32 - 1)) * stats.det_modulus.powf(T::one() / T::of_usize(m));
    Ok(stats.lambda_min >= rhs - T::of(EIGEN_SLACK))
}

/// A certified schlicht ball for a polynomial map: the image ball of radius
/// [`Self::schlicht_radius`] about `F(beta)` is covered injectively from the
/// polydisk of polyradius `eta` about `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MvCertification<T: Real> {
    /// Expansion center in the domain.
    pub center_beta: Vec<Complex<T>>,
    /// Polyradius of the domain polydisk.
    pub domain_radius_eta: T,
    /// Image-ball center `F(beta)`.
    pub image_center: Vec<Complex<T>>,
    /// Certified image-ball radius (zero when a condition fails).
    pub schlicht_radius: T,
    /// Sampled sup of the iteration derivative norm over the torus.
    pub contraction_factor: T,
    /// `eta` minus the inverse-scaled nonlinear remainder maximum.
    pub mapping_margin: T,
    /// Smallest singular value of the Jacobian at `beta`.
    pub lambda_min: T,
    /// Fixed-point argument backing the certificate.
    pub kind: CertKind,
    /// Why the radius is zero, when it is.
    pub diagnostic: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct MvCertRepr {
    center_beta: Vec<[f64; 2]>,
    domain_radius_eta: f64,
    image_center: Vec<[f64; 2]>,
    schlicht_radius: f64,
    contraction_factor: f64,
    mapping_margin: f64,
    lambda_min: f64,
    kind: CertKind,
    diagnostic: Option<String>,
}

impl<T: Real> Serialize for MvCertification<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |v: &[Complex<T>]| {
            v.iter()
                .map(|c| {
                    [
                        c.re.to_f64().unwrap_or(f64::NAN),
                        c.im.to_f64().unwrap_or(f64::NAN),
                    ]
                })
                .collect()
        };
        MvCertRepr {
            center_beta: pairs(&self.center_beta),
            domain_radius_eta: self.domain_radius_eta.to_f64().unwrap_or(f64::NAN),
            image_center: pairs(&self.image_center),
            schlicht_radius: self.schlicht_radius.to_f64().unwrap_or(f64::NAN),
            contraction_factor: self.contraction_factor.to_f64().unwrap_or(f64::NAN),
            mapping_margin: self.mapping_margin.to_f64().unwrap_or(f64::NAN),
            lambda_min: self.lambda_min.to_f64().unwrap_or(f64::NAN),
            kind: self.kind,
            diagnostic: self.diagnostic.clone(),
        }
        .serialize(serializer)
    }
}

/// [`certify_schlicht_mv_grid`] at the default torus density.
pub fn certify_schlicht_mv<T: Real>(
    map: &PolyMap<T>,
    beta: &[Complex<T>],
    eta: T,
    sigma: T,
) -> Result<MvCertification<T>> {
    certify_schlicht_mv_grid(map, beta, eta, sigma, TORUS_ANGLES)
}

/// Certifies a schlicht ball about `F(beta)`.
///
/// Both §5 conditions are checked on the sampled distinguished boundary
/// `|v_l| = eta` (where the relevant plurisubharmonic quantities attain
/// their maxima): the iteration derivative bound
/// `sup ||A^-1 (F'(beta+v) - A)|| <= 1 - sigma` and the mapping margin
/// `eta - ||A^-1|| sup ||remainder|| >= sigma eta`, with
/// `A = F'(beta)`. When both hold, the ball of radius
/// `sigma * eta * lambda_min(A)` is certified; otherwise the radius is zero
/// and `diagnostic` records the failing condition.
pub fn certify_schlicht_mv_grid<T: Real>(
    map: &PolyMap<T>,
    beta: &[Complex<T>],
    eta: T,
    sigma: T,
    n_angles: usize,
) -> Result<MvCertification<T>> {
    check_point(map, beta)?;
    check_desk_dim(map.dim())?;
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(Error::Domain(format!(
            "polyradius eta must be positive and finite, got {eta}"
        )));
    }
    if !(sigma > T::zero() && sigma < T::one()) {
        return Err(Error::Domain(format!(
            "sigma must lie strictly inside (0, 1), got {sigma}"
        )));
    }
    if n_angles < 2 {
        return Err(Error::Domain("need at least two angles per axis".into()));
    }
    let m = map.dim();
    let shifted = map.recenter(beta)?;
    let a = shifted.jacobian(&vec![Complex::default(); m]);
    let sv = linalg::singular_values(&a);
    let lambda_min = sv.last().copied().unwrap_or_else(T::zero);
    let a_inv = linalg::invert(&a).ok_or(Error::DegenerateCenter {
        modulus: lambda_min.to_f64().unwrap_or(0.0),
        threshold: f64::EPSILON,
    })?;
    let image_center = shifted.eval(&vec![Complex::default(); m]);

    let mut max_remainder = T::zero();
    let mut max_slope = T::zero();
    for_each_torus(m, n_angles, eta, |v| {
        let fv = shifted.eval(v);
        let linear = linalg::mat_vec(&a, v);
        let remainder: T = fv
            .iter()
            .zip(&image_center)
            .zip(&linear)
            .map(|((f, f0), l)| (f - f0 - l).norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt();
        max_remainder = max_remainder.max(remainder);

        let mut jac = shifted.jacobian(v);
        for (row, a_row) in jac.iter_mut().zip(&a) {
            for (entry, a_entry) in row.iter_mut().zip(a_row) {
                *entry = *entry - a_entry;
            }
        }
        let slope = linalg::op_norm(&linalg::mat_mul(&a_inv, &jac));
        max_slope = max_slope.max(slope);
    });

    let inv_norm = linalg::op_norm(&a_inv);
    let mapping_margin = eta - inv_norm * max_remainder;
    let contraction_ok = max_slope <= T::one() - sigma;
    let mapping_ok = mapping_margin >= sigma * eta;
    let (schlicht_radius, diagnostic) = if contraction_ok && mapping_ok {
        (sigma * eta * lambda_min, None)
    } else {
        let mut reasons = Vec::new();
        if !contraction_ok {
            reasons.push(format!(
                "contraction factor {max_slope} exceeds 1 - sigma = {}",
                T::one() - sigma
            ));
        }
        if !mapping_ok {
            reasons.push(format!(
                "mapping margin {mapping_margin} is below sigma * eta = {}",
                sigma * eta
            ));
        }
        (T::zero(), Some(reasons.join("; ")))
    };
    Ok(MvCertification {
        center_beta: beta.to_vec(),
        domain_radius_eta: eta,
        image_center,
        schlicht_radius,
        contraction_factor: max_slope,
        mapping_margin,
        lambda_min,
        kind: CertKind::BanachContraction,
        diagnostic,
    })
}

fn euclid<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .fold(T::zero(), |acc, v| acc + v)
        .sqrt()
}

/// Fixed-point iteration of a self-map of the Euclidean ball around
/// `center`; the multivariate analogue of the scalar solver, with the same
/// convergence, escape, and budget semantics.
pub fn banach_solve_mv<T: Real>(
    g: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    start: &[Complex<T>],
    center: &[Complex<T>],
    radius: T,
    tol: T,
    max_iter: usize,
) -> Result<Vec<Complex<T>>> {
    if !tol.is_finite() || tol <= T::zero() {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "domain radius must be positive and finite, got {radius}"
        )));
    }
    if start.len() != center.len() {
        return Err(Error::Domain("start and center dimensions differ".into()));
    }
    let finite = |v: &[Complex<T>]| v.iter().all(|c| is_finite_c(*c));
    if !finite(start) || !finite(center) {
        return Err(Error::NonFinite("iteration start or domain center".into()));
    }
    let limit = radius * (T::one() + T::of(crate::contraction::DOMAIN_SLACK));
    let distance = euclid(start, center);
    if distance > limit {
        return Err(Error::DomainEscape {
            distance: distance.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut z = start.to_vec();
    let mut last_step = T::infinity();
    for _ in 0..max_iter {
        let zn = g(&z);
        if zn.len() != z.len() {
            return Err(Error::Domain("iteration map changed dimension".into()));
        }
        if !finite(&zn) {
            return Err(Error::NonFinite("fixed-point iterate".into()));
        }
        let step = euclid(&zn, &z);
        if step <= tol {
            return Ok(z);
        }
        let distance = euclid(&zn, center);
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

/// Radical-inverse (van der Corput) value of `index` in the given base.
fn radical_inverse(mut index: usize, base: usize) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * inv;
        index /= base;
        inv /= b;
    }
    out
}

const HALTON_BASES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Empirically verifies a multivariate certificate, mirroring the scalar
/// verifier: deterministic quasi-uniform samples `w` in the open image ball
/// (Halton points in the cube, rejection-filtered to the ball), fixed-point
/// solves, residual checks against [`VERIFY_RESIDUAL_TOL`], and an
/// injectivity scan over the solved preimages.
pub fn verify_schlicht_ball<T: Real>(
    map: &PolyMap<T>,
    cert: &MvCertification<T>,
    n_samples: usize,
) -> Result<VerifyReport> {
    if !(cert.schlicht_radius > T::zero()) {
        return Err(Error::Domain(
            "certificate has an empty schlicht ball".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let m = map.dim();
    if 2 * m > HALTON_BASES.len() {
        return Err(Error::Domain(format!(
            "ball sampling supports dimension at most {}, got {m}",
            HALTON_BASES.len() / 2
        )));
    }
    let shifted = map.recenter(&cert.center_beta)?;
    let origin = vec![Complex::default(); m];
    let a = shifted.jacobian(&origin);
    let a_inv = linalg::invert(&a).ok_or(Error::DegenerateCenter {
        modulus: 0.0,
        threshold: f64::EPSILON,
    })?;
    let f0 = shifted.eval(&origin);
    let tol = T::of(SOLVE_TOL);
    // Iterates stay inside the domain polydisk; its circumscribed ball is a
    // convenient escape boundary for the Euclidean-norm solver.
    let solve_radius = cert.domain_radius_eta * T::of_usize(m).sqrt();

    let mut solved: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)> = Vec::with_capacity(n_samples);
    let mut solver_failures = 0usize;
    let mut residual_failures = 0usize;
    let mut worst_residual = 0f64;

    let mut index = 1usize;
    for _ in 0..n_samples {
        // Next Halton point inside the unit ball of R^(2m).
        let u = loop {
            let coords: Vec<f64> = (0..2 * m)
                .map(|d| 2.0 * radical_inverse(index, HALTON_BASES[d]) - 1.0)
                .collect();
            index += 1;
            if coords.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                break coords;
            }
        };
        let w: Vec<Complex<T>> = (0..m)
            .map(|l| {
                cert.image_center[l]
                    + Complex::new(T::of(u[2 * l]), T::of(u[2 * l + 1])) * cert.schlicht_radius
            })
            .collect();
        let shift = linalg::mat_vec(
            &a_inv,
            &w.iter().zip(&f0).map(|(wi, fi)| wi - fi).collect::<Vec<_>>(),
        );
        let g = |v: &[Complex<T>]| {
            let fv = shifted.eval(v);
            let lin = linalg::mat_vec(&a, v);
            let n: Vec<Complex<T>> = fv
                .iter()
                .zip(&f0)
                .zip(&lin)
                .map(|((f, f0i), l)| f - f0i - l)
                .collect();
            let correction = linalg::mat_vec(&a_inv, &n);
            shift
                .iter()
                .zip(&correction)
                .map(|(s, c)| s - c)
                .collect()
        };
        match banach_solve_mv(g, &origin, &origin, solve_radius, tol, SOLVE_MAX_ITER) {
            Err(_) => solver_failures += 1,
            Ok(v) => {
                let residual = euclid(&shifted.eval(&v), &w).to_f64().unwrap_or(f64::NAN);
                if !(residual <= VERIFY_RESIDUAL_TOL) {
                    residual_failures += 1;
                } else {
                    worst_residual = worst_residual.max(residual);
                    let z: Vec<Complex<T>> =
                        v.iter().zip(&cert.center_beta).map(|(vi, bi)| vi + bi).collect();
                    solved.push((w, z));
                }
            }
        }
    }

    let z_tol = T::of(1e-9);
    let w_tol = T::of(1e-6);
    solved.sort_by(|a, b| {
        a.1[0]
            .re
            .partial_cmp(&b.1[0].re)
            .unwrap_or(Ordering::Equal)
    });
    let mut injectivity_collisions = 0usize;
    for i in 0..solved.len() {
        for j in (i + 1)..solved.len() {
            if solved[j].1[0].re - solved[i].1[0].re > z_tol {
                break;
            }
            if euclid(&solved[j].1, &solved[i].1) < z_tol && euclid(&solved[j].0, &solved[i].0) >= w_tol
            {
                injectivity_collisions += 1;
            }
        }
    }

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

fn check_theorem_args<T: Real>(m: u32, k: T) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("dimension m must be at least one".into()));
    }
    if !(k >= T::one()) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "quasiconformality constant K must be at least one, got {k}"
        )));
    }
    Ok(())
}

/// The dimension-`m` K-mapping theorem bound: [`wu_bound`] optimized over
/// its free parameters. The returned `gamma`/`sigma` are the optimizing
/// choices; `value` scales as `K^-(3m-1)/2`.
pub fn theorem_bound_mv<T: Real>(m: u32, k: T) -> Result<BoundParams<T>> {
    check_theorem_args(m, k)?;
    optimize_2d(
        |g, s| wu_bound(m, k, g, s).unwrap_or_else(|_| T::nan()),
        (T::of(DEFAULT_GAMMA_RANGE.0), T::of(DEFAULT_GAMMA_RANGE.1)),
        (T::of(DEFAULT_SIGMA_RANGE.0), T::of(DEFAULT_SIGMA_RANGE.1)),
    )
}

/// [`theorem_bound_mv`] for a ball domain instead of a polydisk: the same
/// optimum scaled by `m^(-1/2)`.
pub fn theorem_bound_mv_ball<T: Real>(m: u32, k: T) -> Result<BoundParams<T>> {
    let mut params = theorem_bound_mv(m, k)?;
    params.value = params.value / T::of_usize(m as usize).sqrt();
    Ok(params)
}
