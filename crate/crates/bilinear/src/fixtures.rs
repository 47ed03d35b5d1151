//! Small systems shared by the unit tests of several modules.

use crate::core::{BilinearMap, BilinearSystem, SignClass};
use crate::linalg::vector_from_i64;
use crate::scalar::int;

/// `x*y = (x1·y2 + x2·y1, x1·y2)`, seed `(1, 1)`: Fibonacci growth, rate φ.
pub(crate) fn golden() -> BilinearSystem {
    let op = BilinearMap::from_coeffs(
        2,
        vec![
            (0, 0, 1, int(1)),
            (0, 1, 0, int(1)),
            (1, 0, 1, int(1)),
        ],
    )
    .unwrap();
    BilinearSystem::new(
        2,
        vec![op],
        vec![vector_from_i64(&[1, 1])],
        SignClass::Nonnegative,
    )
    .unwrap()
}

/// `x*y = (x1·y1 + x2·y2, x2·y2)`, seed `(1, 1)`: growth `f(n) = max f(a)·f(b) + 1`.
pub(crate) fn chained_squares() -> BilinearSystem {
    let op = BilinearMap::from_coeffs(
        2,
        vec![
            (0, 0, 0, int(1)),
            (0, 1, 1, int(1)),
            (1, 1, 1, int(1)),
        ],
    )
    .unwrap();
    BilinearSystem::new(
        2,
        vec![op],
        vec![vector_from_i64(&[1, 1])],
        SignClass::Nonnegative,
    )
    .unwrap()
}

/// One-dimensional system `(x*y) = (x1·y1)` with seed `(2)`: combinations are
/// exactly the powers of two.
pub(crate) fn doubling() -> BilinearSystem {
    let op = BilinearMap::from_coeffs(1, vec![(0, 0, 0, int(1))]).unwrap();
    BilinearSystem::new(
        1,
        vec![op],
        vec![vector_from_i64(&[2])],
        SignClass::Nonnegative,
    )
    .unwrap()
}
