//! Certified enclosures for the spectral radius of a nonnegative matrix and
//! for the joint spectral radius of a finite set of nonnegative matrices.
//!
//! Both quantities are bracketed by the same two-sided mechanism:
//!
//! * **Lower bounds** come from diagonal entries of exact matrix powers:
//!   `(A^n)_{i,i}^{1/n} ≤ ρ(A)`, and the supremum over `n` attains `ρ(A)`.
//! * **Upper bounds** come from scaled max-norms: `ρ(A) ≤ (d·‖A^n‖)^{1/n}`,
//!   where the dimension factor `d` repairs the max-norm's failure to be
//!   submultiplicative.
//!
//! All powers, diagonals, and norms are computed in exact rational arithmetic;
//! only the final `n`-th roots move to floating point, rounded toward the safe
//! side and re-verified by exact comparison (see [`crate::scalar`]). Every
//! returned endpoint therefore really bounds the true value, and each carries
//! a witness recording the exact rational it was derived from.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{int, nth_root_above, nth_root_below, Scalar};
use num_traits::Zero;

/// Default iteration cap for [`spectral_radius`].
const DEFAULT_CAP: usize = 1024;

/// Power cap for the per-product radius scans inside [`jsr_bounds`].
const PER_PRODUCT_CAP: usize = 64;

/// Witness backing a certified lower endpoint.
///
/// `value` is an exact diagonal entry produced by a `power`-fold product, so
/// `value^(1/power)` is a sound lower bound on the enclosed quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagWitness {
    /// Root order: the total product length behind `value`.
    pub power: u32,
    /// Diagonal coordinate the value was read from.
    pub index: usize,
    /// Exact diagonal entry.
    pub value: Scalar,
}

/// Witness backing a certified upper endpoint.
///
/// `value` is `d·‖W‖` for an exact `power`-fold product `W`, so
/// `value^(1/power)` is a sound upper bound on the enclosed quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormWitness {
    /// Root order: the total product length behind `value`.
    pub power: u32,
    /// Exact scaled norm `d·‖W‖`.
    pub value: Scalar,
}

/// A two-sided certified enclosure `lo ≤ true value ≤ hi`.
///
/// Both endpoints are sound individually: `lo` is always a valid lower bound
/// and `hi` a valid upper bound, whether or not the run converged to the
/// requested tolerance. `converged` reports whether `hi − lo ≤ tol` was
/// reached before the iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    /// Certified lower endpoint (a float verified to satisfy its witness).
    pub lo: f64,
    /// Certified upper endpoint.
    pub hi: f64,
    /// Whether the requested tolerance was met before the cap.
    pub converged: bool,
    /// Number of product lengths scanned.
    pub iterations: usize,
    /// Exact backing for `lo`; `None` when `lo` is the trivial bound `0`.
    pub lo_witness: Option<DiagWitness>,
    /// Exact backing for `hi`; `None` only when nothing was scanned.
    pub hi_witness: Option<NormWitness>,
}

impl Enclosure {
    /// Width `hi − lo` of the enclosure.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Whether `x` lies inside the enclosure.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn require_square_nonnegative(a: &Matrix, operation: &'static str) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::InvalidArgument(format!(
            "{operation} needs a matrix of dimension at least 1"
        )));
    }
    if !a.is_nonnegative() {
        return Err(Error::SignsUnsupported {
            operation,
            context: "matrix has a negative entry".to_string(),
        });
    }
    Ok(())
}

fn validate_tolerance(tol: f64, operation: &'static str) -> Result<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{operation} needs a nonnegative tolerance, got {tol}"
        )));
    }
    Ok(())
}

/// Shared scan driving every enclosure in this module.
///
/// Walks exact powers `A, A², …` up to `cap` steps. At step `k` it reads the
/// best diagonal entry and the scaled norm of `A^k`, takes verified roots of
/// order `k·root_scale`, and folds them into the running `lo`/`hi`. The
/// `root_scale` is 1 for a plain spectral radius; callers bounding a quantity
/// per `root_scale` product steps (such as a growth rate per pattern
/// occurrence) pass the size of one step.
pub(crate) fn radius_scan(a: &Matrix, tol: f64, cap: usize, root_scale: u32) -> Result<Enclosure> {
    require_square_nonnegative(a, "radius enclosure")?;
    validate_tolerance(tol, "radius enclosure")?;
    if cap == 0 || root_scale == 0 {
        return Err(Error::InvalidArgument(
            "radius enclosure needs a positive iteration cap and root scale".to_string(),
        ));
    }
    let d = int(a.dim() as i64);
    let mut power = a.clone();
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut lo_witness: Option<DiagWitness> = None;
    let mut hi_witness: Option<NormWitness> = None;
    let mut converged = false;
    let mut iterations = 0usize;
    for k in 1..=cap {
        iterations = k;
        let order = (k as u32)
            .checked_mul(root_scale)
            .ok_or_else(|| Error::InvalidArgument("root order overflows".to_string()))?;
        let (index, diag) = power.max_diagonal();
        if !diag.is_zero() {
            let root = nth_root_below(diag, order);
            if root > lo {
                lo = root;
                lo_witness = Some(DiagWitness {
                    power: order,
                    index,
                    value: diag.clone(),
                });
            }
        }
        let scaled_norm = &d * &power.max_norm();
        let root = nth_root_above(&scaled_norm, order);
        if root < hi {
            hi = root;
            hi_witness = Some(NormWitness {
                power: order,
                value: scaled_norm,
            });
        }
        if hi - lo <= tol {
            converged = true;
            break;
        }
        if k < cap {
            power = power.mul(a);
        }
    }
    Ok(Enclosure {
        lo,
        hi,
        converged,
        iterations,
        lo_witness,
        hi_witness,
    })
}

/// Certified enclosure of the spectral radius of a nonnegative matrix.
///
/// The lower endpoint is `max_{n ≤ N} max_i (A^n)_{i,i}^{1/n}` and the upper
/// endpoint `min_{n ≤ N} (d·‖A^n‖)^{1/n}`, with `N` grown until the width is
/// at most `tol` or an internal cap is reached; an unconverged run returns a
/// wide enclosure with `converged == false`, and both endpoints stay sound.
pub fn spectral_radius(a: &Matrix, tol: f64) -> Result<Enclosure> {
    radius_scan(a, tol, DEFAULT_CAP, 1)
}

/// [`spectral_radius`] with an explicit iteration cap.
pub fn spectral_radius_capped(a: &Matrix, tol: f64, cap: usize) -> Result<Enclosure> {
    radius_scan(a, tol, cap, 1)
}

/// The diagonal-root profile `max_i (A^n)_{i,i}^{1/n}` for `n = 1..=n_max`,
/// each value rounded down so it is a sound lower bound on `ρ(A)`.
///
/// The running supremum of the profile is nondecreasing in `n_max` and
/// converges to `ρ(A)`.
pub fn diag_formula_profile(a: &Matrix, n_max: usize) -> Result<Vec<f64>> {
    require_square_nonnegative(a, "diagonal profile")?;
    let mut profile = Vec::with_capacity(n_max);
    let mut power = Matrix::identity(a.dim());
    for n in 1..=n_max {
        power = power.mul(a);
        let (_, diag) = power.max_diagonal();
        profile.push(if diag.is_zero() {
            0.0
        } else {
            nth_root_below(diag, n as u32)
        });
    }
    Ok(profile)
}

/// Keeps only the entrywise-maximal matrices, first-inserted winning ties.
/// Dropping a dominated product is sound for both enclosure directions:
/// extensions of a dominated product stay dominated entrywise, so neither the
/// maximal diagonal entries nor the maximal norms at any length change.
fn prune_products(candidates: Vec<Matrix>) -> Vec<Matrix> {
    let mut kept: Vec<Matrix> = Vec::new();
    for w in candidates {
        if kept.iter().any(|k| w.le(k)) {
            continue;
        }
        kept.retain(|k| !k.le(&w));
        kept.push(w);
    }
    kept
}

/// Certified enclosure of the joint spectral radius of a finite set of
/// nonnegative matrices, exploring products of length at most `depth`.
///
/// * `lo` is the best certified spectral-radius lower bound over explored
///   products `W` of length `n`, each read as `ρ(W)^{1/n}`, which in turn is
///   bounded from below through diagonal entries of powers of `W` (so a
///   `lo_witness` of order `n·k` refers to a product of `n·k` set elements).
/// * `hi = min_{n ≤ depth} (d·max_{|W|=n} ‖W‖)^{1/n}`.
///
/// Products are explored breadth-first. Entrywise-dominated products are
/// pruned (exactly bound-preserving, see [`prune_products`]), and a product
/// whose scaled-norm root cannot beat the current `lo` skips its
/// spectral-radius scan while remaining available for extension.
pub fn jsr_bounds(matrices: &[Matrix], depth: usize) -> Result<Enclosure> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument(
            "joint spectral radius needs a nonempty set of matrices".to_string(),
        ));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument(
            "joint spectral radius needs depth at least 1".to_string(),
        ));
    }
    let dim = matrices[0].dim();
    for m in matrices {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "joint spectral radius matrix set",
                expected: dim,
                found: m.dim(),
            });
        }
        require_square_nonnegative(m, "joint spectral radius")?;
    }
    let d = int(dim as i64);
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut lo_witness: Option<DiagWitness> = None;
    let mut hi_witness: Option<NormWitness> = None;
    let mut frontier: Vec<Matrix> = Vec::new();
    for n in 1..=depth {
        frontier = if n == 1 {
            prune_products(matrices.to_vec())
        } else {
            let mut extended = Vec::with_capacity(frontier.len() * matrices.len());
            for w in &frontier {
                for m in matrices {
                    extended.push(w.mul(m));
                }
            }
            prune_products(extended)
        };
        // Upper bound from the worst norm at this length.
        let max_norm = frontier
            .iter()
            .map(|w| w.max_norm())
            .max()
            .expect("frontier is nonempty");
        let scaled = &d * &max_norm;
        let norm_root = nth_root_above(&scaled, n as u32);
        if norm_root < hi {
            hi = norm_root;
            hi_witness = Some(NormWitness {
                power: n as u32,
                value: scaled,
            });
        }
        // Lower bounds: certified ρ(W)^{1/n} per product, skipping products
        // whose own norm bound shows they cannot improve on the current lo.
        for w in &frontier {
            let ceiling = nth_root_above(&(&d * &w.max_norm()), n as u32);
            if ceiling <= lo {
                continue;
            }
            let scan = radius_scan(w, 0.0, PER_PRODUCT_CAP, n as u32)?;
            if scan.lo > lo {
                lo = scan.lo;
                lo_witness = scan.lo_witness;
            }
        }
    }
    let converged = hi.is_finite();
    Ok(Enclosure {
        lo,
        hi,
        converged,
        iterations: depth,
        lo_witness,
        hi_witness,
    })
}
