//! Several-variable checks: singular-value identities through hand-inverted
//! matrices, the small-eigenvalue inequality on random Jacobians, and
//! empirical soundness of certified schlicht balls.

mod common;

use blochcert::multivariate::{
    banach_solve_mv, certify_schlicht_mv, check_small_eigen, estimate_wu_k, eval_map,
    jacobian_stats, verify_schlicht_ball, MultiPoly, PolyMap,
};
use blochcert::C64;
use common::{random_in_disk, rng};
use rand::Rng;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn origin(m: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); m]
}

/// A random 2x2 complex matrix with entries in the disk of radius 2,
/// redrawn until it is comfortably invertible.
fn random_invertible_2x2(rng: &mut rand_chacha::ChaCha8Rng) -> [[C64; 2]; 2] {
    loop {
        let a = [
            [random_in_disk(rng, 2.0), random_in_disk(rng, 2.0)],
            [random_in_disk(rng, 2.0), random_in_disk(rng, 2.0)],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.norm() > 0.1 {
            return a;
        }
    }
}

fn linear_map(a: &[[C64; 2]; 2]) -> PolyMap<f64> {
    PolyMap::linear(&[a[0].to_vec(), a[1].to_vec()]).unwrap()
}

/// Adjugate inverse of a 2x2, computed right here so the library's own
/// inversion is not in the loop.
fn hand_inverse(a: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

/// The standard coupled quadratic fixture: (z1 + c z2^2, z2 + c z1^2).
fn quad_map(coupling: f64) -> PolyMap<f64> {
    PolyMap::new(vec![
        MultiPoly::new(2, vec![(vec![1, 0], real(1.0)), (vec![0, 2], real(coupling))]).unwrap(),
        MultiPoly::new(2, vec![(vec![0, 1], real(1.0)), (vec![2, 0], real(coupling))]).unwrap(),
    ])
    .unwrap()
}

#[test]
fn extreme_singular_values_are_ordered_and_invert_correctly() {
    let mut rng = rng(401);
    for _ in 0..100 {
        let a = random_invertible_2x2(&mut rng);
        let stats = jacobian_stats(&linear_map(&a), &origin(2)).unwrap();
        assert!(stats.lambda_min <= stats.lambda_max * (1.0 + 1e-14));

        let inv_stats = jacobian_stats(&linear_map(&hand_inverse(&a)), &origin(2)).unwrap();
        let product = inv_stats.lambda_max * stats.lambda_min;
        assert!(
            (product - 1.0).abs() <= 1e-10,
            "lambda_max(A^-1) * lambda_min(A) = {product}"
        );
    }
}

#[test]
fn determinant_modulus_equals_singular_value_product() {
    let mut rng = rng(402);
    for _ in 0..100 {
        let a = random_invertible_2x2(&mut rng);
        let stats = jacobian_stats(&linear_map(&a), &origin(2)).unwrap();
        let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
        let product = stats.lambda_min * stats.lambda_max;
        assert!(
            (product - det).abs() <= 1e-10 * det,
            "singular product {product} vs |det| {det}"
        );
    }
}

#[test]
fn small_eigenvalue_inequality_holds_at_the_pointwise_ratio() {
    // Wu's inequality with K set to the exact ratio at the same point: the
    // tightest K the theorem ever sees.
    let mut rng = rng(403);
    for _ in 0..1000 {
        let a = random_invertible_2x2(&mut rng);
        let map = linear_map(&a);
        let z = origin(2);
        let stats = jacobian_stats(&map, &z).unwrap();
        assert!(!stats.degenerate);
        assert!(
            check_small_eigen(&map, &z, stats.wu_ratio).unwrap(),
            "inequality failed at ratio {}",
            stats.wu_ratio
        );
    }
}

#[test]
fn nonlinear_jacobian_stats_match_the_linearization_at_the_point() {
    // At z0 the Jacobian of the quadratic fixture is [[1, 2c z2], [2c z1, 1]];
    // feeding that matrix through a purely linear map must reproduce the
    // stats exactly.
    let mut rng = rng(404);
    for _ in 0..50 {
        let c = 0.05 + 0.2 * rng.gen::<f64>();
        let map = quad_map(c);
        let z = vec![random_in_disk(&mut rng, 0.5), random_in_disk(&mut rng, 0.5)];
        let jac = [
            [real(1.0), real(2.0 * c) * z[1]],
            [real(2.0 * c) * z[0], real(1.0)],
        ];
        let direct = jacobian_stats(&map, &z).unwrap();
        let via_linear = jacobian_stats(&linear_map(&jac), &origin(2)).unwrap();
        assert!((direct.lambda_min - via_linear.lambda_min).abs() <= 1e-12);
        assert!((direct.lambda_max - via_linear.lambda_max).abs() <= 1e-12);
        assert!((direct.det_modulus - via_linear.det_modulus).abs() <= 1e-12);
    }
}

#[test]
fn recentering_preserves_map_values() {
    let mut rng = rng(405);
    let map = quad_map(0.3);
    for _ in 0..50 {
        let beta = vec![random_in_disk(&mut rng, 0.4), random_in_disk(&mut rng, 0.4)];
        let shifted = map.recenter(&beta).unwrap();
        let v = vec![random_in_disk(&mut rng, 0.5), random_in_disk(&mut rng, 0.5)];
        let direct = map.eval(&[beta[0] + v[0], beta[1] + v[1]]);
        let via_shift = shifted.eval(&v);
        for (d, s) in direct.iter().zip(&via_shift) {
            assert!(
                (d - s).norm() <= 1e-12 * (1.0 + d.norm()),
                "recentred value {s} vs direct {d}"
            );
        }
    }
}

#[test]
fn estimated_k_dominates_interior_pointwise_ratios() {
    let map = quad_map(0.2);
    let est = estimate_wu_k(&map, 0.5, 12).unwrap();
    assert!(!est.degenerate);
    let mut rng = rng(406);
    for _ in 0..200 {
        let z = vec![random_in_disk(&mut rng, 0.45), random_in_disk(&mut rng, 0.45)];
        let stats = jacobian_stats(&map, &z).unwrap();
        // The log of the ratio is plurisubharmonic, so the true sup lives
        // on the boundary torus; allow one percent for the angular
        // discretization of the estimate.
        assert!(
            stats.wu_ratio <= est.k * 1.01,
            "interior ratio {} above estimate {}",
            stats.wu_ratio,
            est.k
        );
    }
}

#[test]
fn certified_balls_from_random_couplings_verify_cleanly() {
    let mut rng = rng(407);
    for _ in 0..10 {
        let c = 0.02 + 0.15 * rng.gen::<f64>();
        let map = quad_map(c);
        let cert = certify_schlicht_mv(&map, &origin(2), 0.5, 0.5).unwrap();
        assert!(
            cert.schlicht_radius > 0.0,
            "coupling {c} failed: {:?}",
            cert.diagnostic
        );
        let report = verify_schlicht_ball(&map, &cert, 1000).unwrap();
        assert!(report.is_clean(), "coupling {c}: {report:?}");
        assert_eq!(report.passed, 1000);
    }
}

#[test]
fn inflated_ball_certificates_are_caught() {
    // The margin-based radius is deliberately conservative, so a mild
    // inflation still lands inside the true schlicht ball; a fourfold one
    // demands preimages beyond the verifier's solve domain and must show
    // up as recorded failures.
    let map = quad_map(0.1);
    let mut cert = certify_schlicht_mv(&map, &origin(2), 0.5, 0.5).unwrap();
    cert.schlicht_radius *= 4.0;
    let report = verify_schlicht_ball(&map, &cert, 1000).unwrap();
    assert!(!report.is_clean(), "inflated ball certificate was not caught");
    assert!(report.failed > 0);
}

#[test]
fn multivariate_solver_inverts_the_quadratic_fixture() {
    // Solving (z1 + c z2^2, z2 + c z1^2) = w by the natural fixed-point
    // form z = w - c (z2^2, z1^2); on the half ball this contracts with
    // factor about 2 c |z|, so iterate errors must shrink geometrically.
    let c = 0.1;
    let map = quad_map(c);
    let w = [real(0.05), real(-0.03)];
    let g = |v: &[C64]| vec![w[0] - real(c) * v[1] * v[1], w[1] - real(c) * v[0] * v[0]];

    let z = banach_solve_mv(g, &origin(2), &origin(2), 0.5, 1e-13, 10_000).unwrap();
    let fz = eval_map(&map, &z).unwrap();
    let residual: f64 = fz
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(residual <= 1e-9, "residual {residual}");

    // Observe the contraction directly.
    let mut v = origin(2);
    let mut prev: Option<f64> = None;
    for _ in 0..40 {
        let vn = g(&v);
        let step: f64 = vn.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        if step < 1e-15 {
            break;
        }
        if let Some(p) = prev {
            if p > 1e-13 {
                assert!(step / p <= 0.15, "ratio {} is not contracting", step / p);
            }
        }
        prev = Some(step);
        v = vn;
    }
}

#[test]
fn solver_flags_escape_and_rejects_bad_starts() {
    let push_out = |v: &[C64]| vec![v[0] * real(2.0) + real(1.0), v[1] * real(2.0)];
    let err = banach_solve_mv(push_out, &origin(2), &origin(2), 0.5, 1e-12, 100).unwrap_err();
    assert!(matches!(err, blochcert::Error::DomainEscape { .. }), "got {err:?}");

    let start = vec![real(1.0), real(0.0)];
    let err = banach_solve_mv(|v: &[C64]| v.to_vec(), &start, &origin(2), 0.5, 1e-12, 100).unwrap_err();
    assert!(matches!(err, blochcert::Error::DomainEscape { .. }), "got {err:?}");
}
