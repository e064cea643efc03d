//! Shared oracles and generators for the integration tests.
//!
//! The oracles deliberately avoid the library's own algorithms: evaluation
//! is plain term-by-term summation, maxima come from dense sampling, roots
//! come from Durand-Kerner iteration. Agreement between the two routes is
//! the point of the tests.

// Each test target compiles this module separately and uses its own subset.
#![allow(dead_code)]

use blochcert::series::Poly;
use blochcert::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform point of the closed disk of the given radius about the origin.
pub fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, theta)
}

/// A random polynomial of exactly the given degree with coefficients in the
/// closed unit disk.
pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Poly<f64> {
    let mut coeffs: Vec<C64> = (0..=degree).map(|_| random_in_disk(rng, 1.0)).collect();
    if let Some(top) = coeffs.last_mut() {
        if top.norm() < 1e-3 {
            *top = C64::new(0.5, 0.5);
        }
    }
    Poly::new(C64::new(0.0, 0.0), coeffs).expect("finite coefficients")
}

/// A random normalized polynomial (f(0) = 0, f'(0) = 1) of the given degree
/// whose higher coefficients lie in the disk of radius `scale`.
pub fn random_normalized_poly(rng: &mut ChaCha8Rng, degree: usize, scale: f64) -> Poly<f64> {
    let mut coeffs = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    for _ in 2..=degree {
        coeffs.push(random_in_disk(rng, scale));
    }
    Poly::new(C64::new(0.0, 0.0), coeffs).expect("finite coefficients")
}

/// Plain term-by-term evaluation: sum of coeffs[k] * (z - center)^k with
/// powers built by repeated multiplication.
pub fn eval_term_by_term(p: &Poly<f64>, z: C64) -> C64 {
    let w = z - p.center();
    let mut acc = C64::new(0.0, 0.0);
    let mut pw = C64::new(1.0, 0.0);
    for &c in p.coeffs() {
        acc += c * pw;
        pw *= w;
    }
    acc
}

/// Max modulus over `n` equispaced points of the circle |z - c| = rho,
/// with no refinement. A lower bound for the true maximum.
pub fn dense_circle_max(p: &Poly<f64>, c: C64, rho: f64, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / n as f64;
            p.eval(c + C64::from_polar(rho, theta)).norm()
        })
        .fold(0.0, f64::max)
}

/// All roots of `p` by Durand-Kerner iteration. Independent of every solver
/// in the library. Panics if the iteration stalls, which does not happen for
/// the well-conditioned polynomials used in these tests.
pub fn durand_kerner_roots(p: &Poly<f64>) -> Vec<C64> {
    let coeffs = p.coeffs();
    let n = coeffs.len() - 1;
    assert!(n >= 1, "need a nonconstant polynomial");
    let lead = coeffs[n];
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();
    let eval_monic = |z: C64| {
        let mut acc = C64::new(0.0, 0.0);
        let mut pw = C64::new(1.0, 0.0);
        for &c in &monic {
            acc += c * pw;
            pw *= z;
        }
        acc
    };
    // Standard starting configuration: powers of a non-real point that is
    // not a root of unity.
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval_monic(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            // Roots of the shifted variable w = z - center; translate back.
            return roots.iter().map(|&w| w + p.center()).collect();
        }
    }
    panic!("Durand-Kerner did not converge");
}
