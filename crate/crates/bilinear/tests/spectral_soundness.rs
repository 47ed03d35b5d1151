//! Validates the exact-arithmetic spectral enclosures against a floating-point
//! eigenvalue oracle on randomly generated nonnegative matrices.

use bilinear::linalg::{matrix_from_i64, Matrix};
use bilinear::scalar::{rat, to_f64_below};
use bilinear::spectra::{diag_formula_profile, jsr_bounds, spectral_radius, spectral_radius_capped};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PHI: f64 = 1.618033988749895;

/// Floating-point spectral radius via complex eigenvalues. The test matrices
/// have dyadic entries, so the conversion to `f64` is exact and the only
/// error is the eigenvalue solver's own.
fn rho_oracle(m: &Matrix) -> f64 {
    let d = m.dim();
    let dense = DMatrix::from_fn(d, d, |i, j| to_f64_below(m.get(i, j)));
    dense
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[test]
fn random_matrices_stay_inside_the_enclosure() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..40 {
        let d = rng.gen_range(1..=5);
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, rat(rng.gen_range(0..=8), 4));
            }
        }
        let enclosure = spectral_radius_capped(&m, 1e-6, 40).unwrap();
        let rho = rho_oracle(&m);
        assert!(
            enclosure.lo <= rho + 1e-9,
            "round {round}: lower bound {} exceeds oracle {rho}",
            enclosure.lo
        );
        assert!(
            rho <= enclosure.hi + 1e-9,
            "round {round}: oracle {rho} exceeds upper bound {}",
            enclosure.hi
        );
        assert!(enclosure.lo >= 0.0 && enclosure.hi.is_finite());
    }
}

#[test]
fn known_radii_are_pinned() {
    let doubler = matrix_from_i64(&[&[2]]);
    let enclosure = spectral_radius(&doubler, 1e-9).unwrap();
    assert_eq!(enclosure.lo, 2.0);
    assert_eq!(enclosure.hi, 2.0);
    assert!(enclosure.converged);

    // The norm-side upper bound tightens like O(1/n), so ask for a width the
    // default iteration cap can certify.
    let fib = matrix_from_i64(&[&[1, 1], &[1, 0]]);
    let enclosure = spectral_radius(&fib, 1e-2).unwrap();
    assert!(enclosure.converged);
    assert!(enclosure.width() <= 1e-2);
    assert!(enclosure.contains(PHI));

    // Diagonal roots approach the radius from below, monotonically in the sup.
    let profile = diag_formula_profile(&fib, 32).unwrap();
    assert!(profile.iter().all(|&r| r <= PHI + 1e-12));
    assert!(profile.last().unwrap() > &1.58);
}

#[test]
fn joint_bounds_cover_known_pairs() {
    // A pair containing its own worst matrix: the joint radius is 3, found
    // exactly at depth 1.
    let pair = [matrix_from_i64(&[&[2]]), matrix_from_i64(&[&[3]])];
    let enclosure = jsr_bounds(&pair, 3).unwrap();
    assert_eq!(enclosure.lo, 3.0);
    assert_eq!(enclosure.hi, 3.0);

    // The two unitriangular Fibonacci factors have joint radius φ.
    let pair = [
        matrix_from_i64(&[&[1, 1], &[0, 1]]),
        matrix_from_i64(&[&[1, 0], &[1, 1]]),
    ];
    let enclosure = jsr_bounds(&pair, 4).unwrap();
    assert!(enclosure.lo <= PHI + 1e-9);
    assert!(enclosure.hi >= PHI - 1e-9);
    assert!(enclosure.lo > 1.55, "lower bound too weak: {}", enclosure.lo);
    // The depth-4 norm bound is (2·‖(AB)²‖)^(1/4) = 10^(1/4) ≈ 1.778.
    assert!(enclosure.hi < 1.8, "upper bound too weak: {}", enclosure.hi);
}
