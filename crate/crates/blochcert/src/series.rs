//! Univariate complex polynomials stored as centered coefficient vectors,
//! with evaluation, differentiation, recentering, and max-modulus estimation
//! on circles.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Real};

/// Equispaced angle count used by [`max_modulus_circle`].
pub const CIRCLE_SAMPLES: usize = 4096;

/// Golden-section iterations per local maximum refinement.
const GOLDEN_ITERS: usize = 64;

/// A polynomial `sum_k coeffs[k] (z - center)^k`, i.e. a truncated Taylor
/// series: `coeffs[k] = f^(k)(center) / k!`.
///
/// The coefficient vector is never empty and carries no trailing zero
/// coefficients (except for the zero polynomial, stored as `[0]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Real> {
    center: Complex<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    /// Builds a polynomial from its center and Taylor coefficients.
    ///
    /// Rejects empty coefficient lists and non-finite entries; trims
    /// trailing zero coefficients.
    pub fn new(center: Complex<T>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("coefficient list must be non-empty".into()));
        }
        if !is_finite_c(center) {
            return Err(Error::NonFinite("polynomial center".into()));
        }
        if coeffs.iter().any(|c| !is_finite_c(*c)) {
            return Err(Error::NonFinite("polynomial coefficient".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex::default()) {
            coeffs.pop();
        }
        Ok(Self { center, coeffs })
    }

    /// The zero polynomial centered at the origin.
    pub fn zero() -> Self {
        Self {
            center: Complex::default(),
            coeffs: vec![Complex::default()],
        }
    }

    /// The identity polynomial `z` centered at the origin.
    pub fn identity() -> Self {
        Self {
            center: Complex::default(),
            coeffs: vec![Complex::default(), Complex::new(T::one(), T::zero())],
        }
    }

    /// Expansion center.
    pub fn center(&self) -> Complex<T> {
        self.center
    }

    /// Taylor coefficients about [`Self::center`].
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `(z - center)^k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Degree of the stored coefficient vector.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex::default())
    }

    /// Evaluates the polynomial at `z` by Horner's scheme in `z - center`.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let u = z - self.center;
        let mut acc = Complex::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Derivative, expanded about the same center.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self {
                center: self.center,
                coeffs: vec![Complex::default()],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| *c * Complex::new(T::of_usize(k), T::zero()))
            .collect();
        Self {
            center: self.center,
            coeffs,
        }
    }

    /// Rewrites the polynomial about the new center `b` (Taylor shift) by
    /// repeated synthetic division. Values are preserved exactly up to
    /// rounding: `self.eval(z) == shifted.eval(z)`.
    pub fn taylor_shift(&self, b: Complex<T>) -> Self {
        let s = b - self.center;
        let mut a = self.coeffs.clone();
        let d = a.len();
        for k in 0..d.saturating_sub(1) {
            for j in (k..d - 1).rev() {
                let t = a[j + 1] * s;
                a[j] += t;
            }
        }
        Self { center: b, coeffs: a }
    }

    /// Copy with all coefficients below index `from` zeroed: the Taylor tail
    /// `sum_{k >= from} coeffs[k] (z - center)^k`.
    pub fn tail(&self, from: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().take(from) {
            *c = Complex::default();
        }
        Self {
            center: self.center,
            coeffs,
        }
    }

    /// Sum of coefficient moduli weighted by `rho^k`: the triangle-inequality
    /// bound for the modulus on the circle of radius `rho` about the center.
    pub fn triangle_bound(&self, rho: T) -> T {
        let mut acc = T::zero();
        let mut pw = T::one();
        for c in &self.coeffs {
            acc = acc + c.norm() * pw;
            pw = pw * rho;
        }
        acc
    }

    /// Parses the JSON literal form `{"center":[re,im],"coeffs":[[re,im],...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Serializes to the JSON literal form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    center: [f64; 2],
    coeffs: Vec<[f64; 2]>,
}

impl<T: Real> Serialize for Poly<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |c: &Complex<T>| {
            [
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            ]
        };
        PolyRepr {
            center: pair(&self.center),
            coeffs: self.coeffs.iter().map(|c| pair(c)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for Poly<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let lift = |p: [f64; 2]| Complex::new(T::of(p[0]), T::of(p[1]));
        Poly::new(lift(repr.center), repr.coeffs.into_iter().map(lift).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Estimates `max |p(z)|` over the circle `|z - c| = rho`.
///
/// Samples [`CIRCLE_SAMPLES`] equispaced angles, then sharpens every local
/// maximum of the sampled profile by golden-section search on its two
/// adjacent arcs. The result is a sampled estimate: it never falls below any
/// sampled modulus and never exceeds the triangle bound of the recentered
/// polynomial.
pub fn max_modulus_circle<T: Real>(p: &Poly<T>, c: Complex<T>, rho: T) -> Result<T> {
    max_modulus_circle_n(p, c, rho, CIRCLE_SAMPLES)
}

/// [`max_modulus_circle`] with an explicit equispaced sample count.
pub fn max_modulus_circle_n<T: Real>(p: &Poly<T>, c: Complex<T>, rho: T, n: usize) -> Result<T> {
    if !rho.is_finite() || rho <= T::zero() {
        return Err(Error::Domain(format!(
            "circle radius must be positive and finite, got {rho}"
        )));
    }
    if !is_finite_c(c) {
        return Err(Error::NonFinite("circle center".into()));
    }
    let n = n.max(8);
    let q = p.taylor_shift(c);
    let modulus_at = |theta: T| q.eval(c + Complex::from_polar(rho, theta)).norm();

    let two_pi = T::PI() + T::PI();
    let step = two_pi / T::of_usize(n);
    let vals: Vec<T> = (0..n).map(|i| modulus_at(T::of_usize(i) * step)).collect();

    let mut best = vals[0];
    let mut flat = true;
    for &v in &vals[1..] {
        if v > best {
            best = v;
        }
        if v != vals[0] {
            flat = false;
        }
    }
    if flat {
        return Ok(best);
    }

    for i in 0..n {
        let prev = vals[(i + n - 1) % n];
        let next = vals[(i + 1) % n];
        if vals[i] >= prev && vals[i] >= next {
            let theta = T::of_usize(i) * step;
            let refined = golden_max(&modulus_at, theta - step, theta + step);
            if refined > best {
                best = refined;
            }
        }
    }
    Ok(best)
}

/// Golden-section maximization of a smooth function on `[lo, hi]`.
fn golden_max<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let inv_phi = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        f1
    } else {
        f2
    }
}

/// Cauchy estimate `M (k-1)! / d^(k-1)` bounding the k-th derivative at a
/// point at distance `d` inside a circle where the function is bounded by `M`.
pub fn cauchy_derivative_bound<T: Real>(m: T, d: T, k: u32) -> Result<T> {
    if !m.is_finite() || m < T::zero() {
        return Err(Error::Domain(format!("modulus bound must be >= 0, got {m}")));
    }
    if !d.is_finite() || d <= T::zero() {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    if k < 1 {
        return Err(Error::Domain("derivative order must be >= 1".into()));
    }
    let mut factorial = T::one();
    for j in 2..k {
        factorial = factorial * T::of_usize(j as usize);
    }
    Ok(m * factorial / d.powi(k as i32 - 1))
}
