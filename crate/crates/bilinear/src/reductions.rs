//! Constructions that connect bilinear growth to matrix-family questions, and
//! transforms that reshape a system while tracking its growth rate.
//!
//! * Matrix ↔ vector embeddings `Γ̃`/`Γ` (row-major) and the single-matrix
//!   system whose growth is `‖Aⁿ‖`.
//! * The joint-spectral embedding: a `3d²+2`-dimensional system whose size-`3m`
//!   growth equals the best max-norm over length-`m` products of `{A, B}`, so
//!   its growth rate is the cube root of the joint spectral radius.
//! * The mortality embedding: three extra signed coordinates on top of the
//!   joint-spectral embedding such that (for nonnegative inputs) the system
//!   reaches the all-zero vector exactly when some product of `{A, B}`
//!   vanishes, plus an exhaustive zero-vector search.
//! * Parity and limit transforms: inserting forced zeros at odd sizes,
//!   appending an always-one coordinate, and appending a geometric coordinate
//!   that makes the growth roots converge to a true limit.
//! * Mergers that trade several seeds or several operators for one of each, at
//!   the price of a fixed root of the growth rate (cube and fifth root).
//! * The positive-seed variant of the joint-spectral embedding: strictly
//!   positive seeds that still reproduce `A` and `B` exactly at size 3.

use std::collections::HashSet;
use std::ops::Range;

use num_traits::{One, Signed};

use crate::core::{
    enumerate_trees, eval_tree, BilinearMap, BilinearSystem, CompositionTree, SignClass,
};
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, Matrix, Vector};
use crate::scalar::{pow_scalar, rat, Scalar};

/// Where each block of an embedded system lives, as ranges of 0-based
/// coordinates. `extra` lists any construction-specific tail coordinates
/// beyond the standard `i`, `j` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    /// Side length of the embedded matrices (or base dimension for the
    /// seed/operator mergers).
    pub d: usize,
    pub r_a: Range<usize>,
    pub r_b: Range<usize>,
    pub r_c: Range<usize>,
    /// The "fresh seed" indicator coordinate (1 exactly at size 1).
    pub i: usize,
    /// The "pair of seeds" indicator coordinate (positive exactly at size 2).
    pub j: usize,
    pub extra: Vec<usize>,
}

/// Which construction produced an embedded system, with its source data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    JointSpectral {
        a: Matrix,
        b: Matrix,
    },
    Mortality {
        a: Matrix,
        b: Matrix,
    },
    TwoSeeds,
    TwoOperators,
    /// Positive-seed joint-spectral embedding: the solved correction matrices
    /// and the ε that made them strictly smaller than `a` and `b`.
    PositiveSeed {
        a: Matrix,
        b: Matrix,
        epsilon: Scalar,
        x: Matrix,
        y: Matrix,
    },
}

/// A bilinear system together with its block layout and the construction
/// that produced it.
#[derive(Debug, Clone)]
pub struct EmbeddedSystem {
    pub system: BilinearSystem,
    pub layout: BlockLayout,
    pub construction: Construction,
}

impl EmbeddedSystem {
    /// Extracts the product block `R_C` of a value as a `d×d` matrix (only
    /// meaningful for the matrix-based constructions where `R_C` has `d²`
    /// coordinates).
    pub fn product_block(&self, v: &Vector) -> Result<Matrix> {
        extract_matrix(&block_vector(v, &self.layout.r_c), self.layout.d)
    }
}

/// Copies a coordinate range of a vector into its own vector.
pub fn block_vector(v: &Vector, range: &Range<usize>) -> Vector {
    Vector::new(range.clone().map(|k| v[k].clone()).collect())
}

/// `Γ̃`: flattens a matrix into a vector, row-major.
pub fn embed_matrix(a: &Matrix) -> Vector {
    let d = a.dim();
    let mut entries = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            entries.push(a.get(p, q).clone());
        }
    }
    Vector::new(entries)
}

/// `Γ`: reassembles a length-`d²` vector into a `d×d` matrix, row-major.
pub fn extract_matrix(v: &Vector, d: usize) -> Result<Matrix> {
    if v.dim() != d * d {
        return Err(Error::DimensionMismatch {
            context: "matrix extraction",
            expected: d * d,
            found: v.dim(),
        });
    }
    let mut m = Matrix::zeros(d);
    for p in 0..d {
        for q in 0..d {
            m.set(p, q, v[p * d + q].clone());
        }
    }
    Ok(m)
}

/// The bilinear map realizing matrix multiplication on flattened matrices:
/// `Γ̃(A) ⊛ Γ̃(B) = Γ̃(AB)`.
pub fn matrix_product_map(d: usize) -> BilinearMap {
    let mut coeffs = Vec::with_capacity(d * d * d);
    for p in 0..d {
        for q in 0..d {
            for r in 0..d {
                coeffs.push((p * d + q, p * d + r, r * d + q, Scalar::one()));
            }
        }
    }
    BilinearMap::from_coeffs(d * d, coeffs).expect("product-map indices are in range")
}

fn require_nonnegative_matrix(m: &Matrix, operation: &'static str) -> Result<()> {
    if !m.is_nonnegative() {
        return Err(Error::SignsUnsupported {
            operation,
            context: "matrix entries must be nonnegative".to_string(),
        });
    }
    Ok(())
}

fn require_same_dims(a: &Matrix, b: &Matrix, context: &'static str) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.dim() == 0 {
        return Err(Error::InvalidArgument(format!(
            "{context} needs matrices of dimension at least 1"
        )));
    }
    Ok(a.dim())
}

/// The system whose combinations of `n` seeds all evaluate to `Γ̃(Aⁿ)`:
/// `g(n) = ‖Aⁿ‖` and the growth rate equals the spectral radius of `A`.
pub fn single_matrix_system(a: &Matrix) -> Result<BilinearSystem> {
    require_nonnegative_matrix(a, "single-matrix system")?;
    if a.dim() == 0 {
        return Err(Error::InvalidArgument(
            "single-matrix system needs dimension at least 1".to_string(),
        ));
    }
    BilinearSystem::new(
        a.dim() * a.dim(),
        vec![matrix_product_map(a.dim())],
        vec![embed_matrix(a)],
        SignClass::Nonnegative,
    )
}

fn matrix_block_layout(d: usize, extra: Vec<usize>) -> BlockLayout {
    let dd = d * d;
    BlockLayout {
        d,
        r_a: 0..dd,
        r_b: dd..2 * dd,
        r_c: 2 * dd..3 * dd,
        i: 3 * dd,
        j: 3 * dd + 1,
        extra,
    }
}

/// The product-buffer rules shared by the joint-spectral constructions:
/// `R_C` multiplies as matrices and absorbs `A` (via `x_j·y_{R_A}`) and `B`
/// (via `x_{R_B}·y_j`); `j` marks exactly the seed pairs.
fn joint_spectral_coeffs(d: usize) -> Vec<(usize, usize, usize, Scalar)> {
    let layout = matrix_block_layout(d, Vec::new());
    let dd = d * d;
    let mut coeffs = Vec::new();
    for p in 0..d {
        for q in 0..d {
            for r in 0..d {
                coeffs.push((
                    layout.r_c.start + p * d + q,
                    layout.r_c.start + p * d + r,
                    layout.r_c.start + r * d + q,
                    Scalar::one(),
                ));
            }
        }
    }
    for alpha in 0..dd {
        coeffs.push((layout.r_c.start + alpha, layout.j, alpha, Scalar::one()));
        coeffs.push((
            layout.r_c.start + alpha,
            layout.r_b.start + alpha,
            layout.j,
            Scalar::one(),
        ));
    }
    coeffs.push((layout.j, layout.i, layout.i, Scalar::one()));
    coeffs
}

fn joint_spectral_seed(a: &Matrix, b: &Matrix, dim: usize) -> Vector {
    let d = a.dim();
    let dd = d * d;
    let mut seed = Vector::zeros(dim);
    let va = embed_matrix(a);
    let vb = embed_matrix(b);
    for alpha in 0..dd {
        seed.set(alpha, va[alpha].clone());
        seed.set(dd + alpha, vb[alpha].clone());
    }
    seed.set(3 * dd, Scalar::one());
    seed
}

/// Embeds the pair `{A, B}` into a `3d²+2`-dimensional nonnegative system.
///
/// Sizes not of the form `3m` (beyond 1 and 2) give the zero vector, and the
/// nonzero `R_C` blocks at size `3m` are exactly the length-`m` products of
/// `{A, B}`, so the growth rate is the cube root of the joint spectral
/// radius of the pair.
pub fn embed_jsr(a: &Matrix, b: &Matrix) -> Result<EmbeddedSystem> {
    let d = require_same_dims(a, b, "joint-spectral embedding")?;
    require_nonnegative_matrix(a, "joint-spectral embedding")?;
    require_nonnegative_matrix(b, "joint-spectral embedding")?;
    let dim = 3 * d * d + 2;
    let op = BilinearMap::from_coeffs(dim, joint_spectral_coeffs(d))?;
    let system = BilinearSystem::new(
        dim,
        vec![op],
        vec![joint_spectral_seed(a, b, dim)],
        SignClass::Nonnegative,
    )?;
    Ok(EmbeddedSystem {
        system,
        layout: matrix_block_layout(d, Vec::new()),
        construction: Construction::JointSpectral {
            a: a.clone(),
            b: b.clone(),
        },
    })
}

/// One exhaustively-checked defect of the joint-spectral embedding.
#[derive(Debug, Clone)]
pub struct BufferViolation {
    /// Which claim failed.
    pub condition: &'static str,
    /// The counterexample combination tree.
    pub tree: CompositionTree,
    pub detail: String,
}

/// Result of [`verify_buffer_analysis`]: empty `violations` means every claim
/// held on every tree up to the requested size.
#[derive(Debug, Clone)]
pub struct BufferReport {
    pub n_max: usize,
    pub trees_checked: usize,
    pub violations: Vec<BufferViolation>,
}

impl BufferReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Is every subcombination of a nonzero-valued tree sized compatibly with the
/// block structure? Sizes 1–3 are always fine; a size-`3m` tree with `m ≥ 2`
/// must split into two size-multiples of 3; everything else cannot carry a
/// nonzero value.
fn block_shaped(tree: &CompositionTree) -> bool {
    let n = tree.leaf_count();
    if n <= 3 {
        return true;
    }
    if !n.is_multiple_of(3) {
        return false;
    }
    match tree {
        CompositionTree::Leaf { .. } => true,
        CompositionTree::Node { left, right, .. } => {
            left.leaf_count().is_multiple_of(3)
                && right.leaf_count().is_multiple_of(3)
                && block_shaped(left)
                && block_shaped(right)
        }
    }
}

/// The 3-leaf combination whose `R_C` block realizes `A` (left shape) or `B`
/// (right shape).
fn block_tree(pick_b: bool) -> CompositionTree {
    let pair = CompositionTree::node(0, CompositionTree::leaf(0), CompositionTree::leaf(0));
    if pick_b {
        CompositionTree::node(0, CompositionTree::leaf(0), pair)
    } else {
        CompositionTree::node(0, pair, CompositionTree::leaf(0))
    }
}

/// Left-comb block tree realizing the product of the given word
/// (`false` = `A`, `true` = `B`), in word order.
fn word_tree(word: &[bool]) -> CompositionTree {
    let mut iter = word.iter();
    let mut acc = block_tree(*iter.next().expect("word is nonempty"));
    for &letter in iter {
        acc = CompositionTree::node(0, acc, block_tree(letter));
    }
    acc
}

/// All length-`m` products over `{A, B}` in word order, paired with the word.
fn word_products(a: &Matrix, b: &Matrix, m: usize) -> Vec<(Vec<bool>, Matrix)> {
    let mut out: Vec<(Vec<bool>, Matrix)> = vec![(Vec::new(), Matrix::identity(a.dim()))];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|(word, product)| {
                [(false, a), (true, b)].into_iter().map(move |(bit, m)| {
                    let mut w = word.clone();
                    w.push(bit);
                    (w, product.mul(m))
                })
            })
            .collect();
    }
    out
}

/// Brute-forces every combination tree of the joint-spectral embedding up to
/// `n_max` leaves and checks the four structural claims:
///
/// (a) `v_{R_C} = 0` whenever the size is not a multiple of 3;
/// (b) a nonzero `R_C` block at size `3m` is a length-`m` product of `{A, B}`;
/// (c) every length-`m` word is realized exactly by its left-comb block tree
///     (checked by construction, equality even when the product is zero);
/// (d) a tree with any nonzero value is block-shaped in every subcombination.
pub fn verify_buffer_analysis(a: &Matrix, b: &Matrix, n_max: usize) -> Result<BufferReport> {
    let embedded = embed_jsr(a, b)?;
    let system = &embedded.system;
    let layout = &embedded.layout;
    let mut violations = Vec::new();
    let mut trees_checked = 0usize;
    for n in 1..=n_max {
        let products = if n % 3 == 0 {
            word_products(a, b, n / 3)
        } else {
            Vec::new()
        };
        for tree in enumerate_trees(n, 1, 1)? {
            trees_checked += 1;
            let v = eval_tree(system, &tree)?;
            let rc = block_vector(&v, &layout.r_c);
            if n % 3 != 0 && !rc.is_zero() {
                violations.push(BufferViolation {
                    condition: "product block vanishes off multiples of 3",
                    tree: tree.clone(),
                    detail: format!("size {n} has a nonzero product block"),
                });
            }
            if n % 3 == 0 && !rc.is_zero() {
                let got = extract_matrix(&rc, layout.d)?;
                if !products.iter().any(|(_, p)| *p == got) {
                    violations.push(BufferViolation {
                        condition: "nonzero product block is a word product",
                        tree: tree.clone(),
                        detail: format!(
                            "size {n} produced a block outside the length-{} products",
                            n / 3
                        ),
                    });
                }
            }
            if !v.is_zero() && !block_shaped(&tree) {
                violations.push(BufferViolation {
                    condition: "nonzero values require block-shaped trees",
                    tree: tree.clone(),
                    detail: format!("size {n} is not block-shaped yet evaluates nonzero"),
                });
            }
        }
    }
    for m in 1..=n_max / 3 {
        for (word, product) in word_products(a, b, m) {
            let tree = word_tree(&word);
            let v = eval_tree(system, &tree)?;
            let got = extract_matrix(&block_vector(&v, &layout.r_c), layout.d)?;
            if got != product {
                violations.push(BufferViolation {
                    condition: "every word is realized by its block tree",
                    tree,
                    detail: format!("length-{m} word is not reproduced exactly"),
                });
            }
        }
    }
    Ok(BufferReport {
        n_max,
        trees_checked,
        violations,
    })
}

/// Embeds `{A, B}` so that the all-zero vector is reachable exactly when some
/// product over `{A, B}` is the zero matrix (verified for nonnegative
/// matrices).
///
/// Three extra coordinates are appended to the joint-spectral embedding. The
/// first two tick through sizes `3m+1` / `3m+2` on the balanced shapes; the
/// third cancels exactly on the two 3-leaf combinations (via its two negative
/// coefficients — the system is sign class `General`) and otherwise traps
/// every tree that is not a clean block tree: it propagates any positive
/// third-coordinate mass (`x_{t3}·Σy + Σx·y_{t3}`) and detects the mixed
/// shapes (`x_j y_j`, `x_i·Σy_{R_C}`, `Σx_{R_C}·y_i`, `x_j·Σy_{R_C}`,
/// `Σx_{R_C}·y_j`). Clean block trees keep all three extra coordinates at
/// zero, so their value vanishes exactly when the word product does.
///
/// For matrices with mixed signs the trap sums can cancel, so the
/// zero-reachability equivalence is only guaranteed on nonnegative inputs.
pub fn embed_mortality(a: &Matrix, b: &Matrix) -> Result<EmbeddedSystem> {
    let d = require_same_dims(a, b, "mortality embedding")?;
    let dd = d * d;
    let dim = 3 * dd + 5;
    let (i, j) = (3 * dd, 3 * dd + 1);
    let (t1, t2, t3) = (3 * dd + 2, 3 * dd + 3, 3 * dd + 4);
    let r_c = 2 * dd..3 * dd;
    let mut coeffs = joint_spectral_coeffs(d);
    coeffs.push((t1, t2, t2, Scalar::one()));
    coeffs.push((t2, t1, t1, Scalar::one()));
    // The canceling core: zero on both 3-leaf combinations.
    coeffs.push((t3, t1, t2, Scalar::one()));
    coeffs.push((t3, t2, t1, Scalar::one()));
    coeffs.push((t3, t3, t3, Scalar::one()));
    coeffs.push((t3, i, j, -Scalar::one()));
    coeffs.push((t3, j, i, -Scalar::one()));
    // Trap propagation: once positive, t3 stays positive under any further
    // combination with a not-all-zero partner.
    for c in 0..dim {
        coeffs.push((t3, t3, c, Scalar::one()));
        coeffs.push((t3, c, t3, Scalar::one()));
    }
    // Shape detectors: pairs, seeds, and product mass in non-block positions.
    coeffs.push((t3, j, j, Scalar::one()));
    for alpha in r_c.clone() {
        coeffs.push((t3, i, alpha, Scalar::one()));
        coeffs.push((t3, alpha, i, Scalar::one()));
        coeffs.push((t3, j, alpha, Scalar::one()));
        coeffs.push((t3, alpha, j, Scalar::one()));
    }
    let op = BilinearMap::from_coeffs(dim, coeffs)?;
    let mut seed = joint_spectral_seed(a, b, dim);
    seed.set(t1, Scalar::one());
    let system = BilinearSystem::new(dim, vec![op], vec![seed], SignClass::General)?;
    Ok(EmbeddedSystem {
        system,
        layout: matrix_block_layout(d, vec![t1, t2, t3]),
        construction: Construction::Mortality {
            a: a.clone(),
            b: b.clone(),
        },
    })
}

/// A combination tree evaluating to the all-zero vector.
#[derive(Debug, Clone)]
pub struct ZeroWitness {
    pub size: usize,
    pub tree: CompositionTree,
}

/// Exhaustively searches for a combination evaluating to the zero vector,
/// memoizing the achievable values per size (every distinct value keeps its
/// first witness; nothing is pruned, since arbitrary signs preclude
/// domination arguments). Returns the witness earliest in canonical tree
/// order (size, then split ascending, then left subtree, right subtree,
/// operator), or `None` when no tree up to `n_max` leaves vanishes.
pub fn find_zero_vector(system: &BilinearSystem, n_max: usize) -> Result<Option<ZeroWitness>> {
    let mut classes: Vec<Vec<(Vector, CompositionTree)>> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut seen: HashSet<Vec<Scalar>> = HashSet::new();
        let mut level: Vec<(Vector, CompositionTree)> = Vec::new();
        if n == 1 {
            for (idx, seed) in system.seeds().iter().enumerate() {
                if seen.insert(seed.entries().to_vec()) {
                    level.push((seed.clone(), CompositionTree::leaf(idx)));
                }
            }
        } else {
            for a in 1..n {
                let b = n - a;
                for (va, ta) in &classes[a - 1] {
                    for (vb, tb) in &classes[b - 1] {
                        for (op_idx, op) in system.operators().iter().enumerate() {
                            let v = op.apply(va, vb);
                            if seen.insert(v.entries().to_vec()) {
                                level.push((
                                    v,
                                    CompositionTree::node(op_idx, ta.clone(), tb.clone()),
                                ));
                            }
                        }
                    }
                }
            }
        }
        if let Some((_, tree)) = level.iter().find(|(v, _)| v.is_zero()) {
            return Ok(Some(ZeroWitness {
                size: n,
                tree: tree.clone(),
            }));
        }
        classes.push(level);
    }
    Ok(None)
}

fn require_single_seed_single_operator(
    system: &BilinearSystem,
    context: &str,
) -> Result<()> {
    if system.operators().len() != 1 || system.seeds().len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{context} needs exactly one operator and one seed, got {} and {}",
            system.operators().len(),
            system.seeds().len()
        )));
    }
    Ok(())
}

/// Doubles every size: the transformed system satisfies `g'(1) = 1`,
/// `g'(2m) = g(m)`, and `g'(2m+1) = 0` for `m ≥ 1`.
///
/// A fresh coordinate carries the new seed; a pair of fresh seeds re-injects
/// the original seed, so original combinations run at exactly twice their
/// size and every odd size beyond 1 dies.
pub fn transform_insert_zero_odd(system: &BilinearSystem) -> Result<BilinearSystem> {
    require_single_seed_single_operator(system, "zero-at-odd-sizes transform")?;
    let d = system.dim();
    let seed = &system.seeds()[0];
    let mut coeffs: Vec<(usize, usize, usize, Scalar)> = system
        .operators()[0]
        .iter()
        .map(|(k, i0, j0, c)| (k, i0, j0, c.clone()))
        .collect();
    for k in 0..d {
        coeffs.push((k, d, d, seed[k].clone()));
    }
    let mut new_seed = Vector::zeros(d + 1);
    new_seed.set(d, Scalar::one());
    BilinearSystem::new(
        d + 1,
        vec![BilinearMap::from_coeffs(d + 1, coeffs)?],
        vec![new_seed],
        system.sign_class(),
    )
}

/// Appends a coordinate that every seed and every combination holds at
/// exactly 1; the growth rate becomes `max(λ, 1)`.
pub fn transform_append_one(system: &BilinearSystem) -> Result<BilinearSystem> {
    let d = system.dim();
    let ops = system
        .operators()
        .iter()
        .map(|op| {
            let mut coeffs: Vec<(usize, usize, usize, Scalar)> =
                op.iter().map(|(k, i0, j0, c)| (k, i0, j0, c.clone())).collect();
            coeffs.push((d, d, d, Scalar::one()));
            BilinearMap::from_coeffs(d + 1, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    let seeds = system
        .seeds()
        .iter()
        .map(|s| {
            let mut entries = s.entries().to_vec();
            entries.push(Scalar::one());
            Vector::new(entries)
        })
        .collect();
    BilinearSystem::new(d + 1, ops, seeds, system.sign_class())
}

/// Appends a geometric pair of coordinates at rate `α > 0`: the last
/// coordinate of every size-`n` value is exactly `αⁿ`, and the one before it
/// re-injects the whole original mass against that geometric floor. For
/// `α ≤ λ` this leaves the growth rate unchanged while making the growth
/// roots `g'(n)^(1/n)` converge to it as a true limit.
///
/// The construction itself only validates `α > 0`; certifying `α ≤ λ` (e.g.
/// by a pattern witness) is the caller's responsibility, and the conclusion
/// about the limit is only sound under that bound.
pub fn transform_ensure_limit(system: &BilinearSystem, alpha: &Scalar) -> Result<BilinearSystem> {
    if !alpha.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "limit transform needs a positive rate, got {alpha}"
        )));
    }
    let d = system.dim();
    let (p, q) = (d, d + 1);
    let ops = system
        .operators()
        .iter()
        .map(|op| {
            let mut coeffs: Vec<(usize, usize, usize, Scalar)> =
                op.iter().map(|(k, i0, j0, c)| (k, i0, j0, c.clone())).collect();
            for i0 in 0..d {
                coeffs.push((p, i0, q, Scalar::one()));
            }
            coeffs.push((q, q, q, Scalar::one()));
            BilinearMap::from_coeffs(d + 2, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    let seeds = system
        .seeds()
        .iter()
        .map(|s| {
            let mut entries = s.entries().to_vec();
            entries.push(alpha.clone());
            entries.push(alpha.clone());
            Vector::new(entries)
        })
        .collect();
    BilinearSystem::new(d + 2, ops, seeds, system.sign_class())
}

fn merger_layout(d: usize) -> BlockLayout {
    BlockLayout {
        d,
        r_a: 0..d,
        r_b: d..2 * d,
        r_c: 2 * d..3 * d,
        i: 3 * d,
        j: 3 * d + 1,
        extra: Vec::new(),
    }
}

fn merger_sign_class(nonnegative: bool) -> SignClass {
    if nonnegative {
        SignClass::Nonnegative
    } else {
        SignClass::General
    }
}

/// The shared buffer plumbing of the seed/operator mergers: `j` marks seed
/// pairs and `R_C` absorbs the two `R` blocks against `j`.
fn merger_buffer_coeffs(d: usize) -> Vec<(usize, usize, usize, Scalar)> {
    let layout = merger_layout(d);
    let mut coeffs = Vec::new();
    for alpha in 0..d {
        coeffs.push((layout.r_c.start + alpha, layout.j, alpha, Scalar::one()));
        coeffs.push((
            layout.r_c.start + alpha,
            layout.r_b.start + alpha,
            layout.j,
            Scalar::one(),
        ));
    }
    coeffs.push((layout.j, layout.i, layout.i, Scalar::one()));
    coeffs
}

/// Merges a two-seed system `(⊛, {s, s′})` into a single-seed system on
/// `3d+2` coordinates whose growth rate is the cube root of the original's:
/// size-`3m` combinations reproduce the original size-`m` combinations in the
/// `R_C` block, with the two seeds recovered from the `R_A`/`R_B` blocks.
pub fn embed_two_seeds(
    op: &BilinearMap,
    seed_a: &Vector,
    seed_b: &Vector,
) -> Result<EmbeddedSystem> {
    let d = op.dim();
    for (name, s) in [("first seed", seed_a), ("second seed", seed_b)] {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "seed merger",
                expected: d,
                found: s.dim(),
            });
        }
        let _ = name;
    }
    if d == 0 {
        return Err(Error::InvalidArgument(
            "seed merger needs dimension at least 1".to_string(),
        ));
    }
    let layout = merger_layout(d);
    let dim = 3 * d + 2;
    let mut coeffs = merger_buffer_coeffs(d);
    for (k, i0, j0, c) in op.iter() {
        coeffs.push((
            layout.r_c.start + k,
            layout.r_c.start + i0,
            layout.r_c.start + j0,
            c.clone(),
        ));
    }
    let mut seed = Vector::zeros(dim);
    for alpha in 0..d {
        seed.set(alpha, seed_a[alpha].clone());
        seed.set(d + alpha, seed_b[alpha].clone());
    }
    seed.set(layout.i, Scalar::one());
    let nonneg = op.is_nonnegative() && seed_a.is_nonnegative() && seed_b.is_nonnegative();
    let system = BilinearSystem::new(
        dim,
        vec![BilinearMap::from_coeffs(dim, coeffs)?],
        vec![seed],
        merger_sign_class(nonneg),
    )?;
    Ok(EmbeddedSystem {
        system,
        layout,
        construction: Construction::TwoSeeds,
    })
}

/// Merges a two-operator system `({⊛₁, ⊛₂}, s)` into a single-operator system
/// on `3d+2` coordinates whose growth rate is the fifth root of the
/// original's. Size congruences modulo 5 govern which block can be nonzero:
/// `R_C` only at sizes `≡ 3`, `R_A`/`R_B` only at sizes `≡ 1`.
pub fn embed_two_ops(
    op_a: &BilinearMap,
    op_b: &BilinearMap,
    seed: &Vector,
) -> Result<EmbeddedSystem> {
    let d = op_a.dim();
    if op_b.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "operator merger",
            expected: d,
            found: op_b.dim(),
        });
    }
    if seed.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "operator merger",
            expected: d,
            found: seed.dim(),
        });
    }
    if d == 0 {
        return Err(Error::InvalidArgument(
            "operator merger needs dimension at least 1".to_string(),
        ));
    }
    let layout = merger_layout(d);
    let dim = 3 * d + 2;
    let mut coeffs = merger_buffer_coeffs(d);
    for (block, op) in [(layout.r_a.start, op_a), (layout.r_b.start, op_b)] {
        for (k, i0, j0, c) in op.iter() {
            coeffs.push((
                block + k,
                layout.r_c.start + i0,
                layout.r_c.start + j0,
                c.clone(),
            ));
        }
    }
    let mut merged_seed = Vector::zeros(dim);
    for alpha in 0..d {
        merged_seed.set(alpha, seed[alpha].clone());
        merged_seed.set(d + alpha, seed[alpha].clone());
    }
    merged_seed.set(layout.i, Scalar::one());
    let nonneg = op_a.is_nonnegative() && op_b.is_nonnegative() && seed.is_nonnegative();
    let system = BilinearSystem::new(
        dim,
        vec![BilinearMap::from_coeffs(dim, coeffs)?],
        vec![merged_seed],
        merger_sign_class(nonneg),
    )?;
    Ok(EmbeddedSystem {
        system,
        layout,
        construction: Construction::TwoOperators,
    })
}

/// Cap on ε-halvings in [`embed_positive`].
const EPSILON_HALVING_CAP: usize = 64;

/// Solves the correction system for the positive-seed embedding at a fixed ε:
/// `X + (X+Y)·(ε²J) = ε³d²·J + (A+B)·(ε²J)` and
/// `Y + (ε²J)·(X+Y) = ε³d²·J + (ε²J)·(A+B)`, flattened to `2d²` unknowns.
fn solve_corrections(a: &Matrix, b: &Matrix, epsilon: &Scalar) -> Result<(Matrix, Matrix)> {
    let d = a.dim();
    let dd = d * d;
    let eps2 = epsilon * epsilon;
    let eps3d2 = pow_scalar(epsilon, 3) * Scalar::from_integer((dd as i64).into());
    let mut lhs = Matrix::zeros(2 * dd);
    let mut rhs = Vector::zeros(2 * dd);
    for p in 0..d {
        for q in 0..d {
            let row_x = p * d + q;
            let row_y = dd + p * d + q;
            lhs.add_assign_at(row_x, row_x, Scalar::one());
            lhs.add_assign_at(row_y, row_y, Scalar::one());
            for r in 0..d {
                // Row sums of X+Y enter the X equation…
                lhs.add_assign_at(row_x, p * d + r, eps2.clone());
                lhs.add_assign_at(row_x, dd + p * d + r, eps2.clone());
                // …column sums enter the Y equation.
                lhs.add_assign_at(row_y, r * d + q, eps2.clone());
                lhs.add_assign_at(row_y, dd + r * d + q, eps2.clone());
            }
            let row_sum: Scalar = (0..d).map(|r| a.get(p, r) + b.get(p, r)).sum();
            let col_sum: Scalar = (0..d).map(|r| a.get(r, q) + b.get(r, q)).sum();
            rhs.set(row_x, &eps3d2 + &eps2 * row_sum);
            rhs.set(row_y, &eps3d2 + &eps2 * col_sum);
        }
    }
    let solution = solve_linear(&lhs, &rhs)?;
    let x = extract_matrix(&block_vector(&solution, &(0..dd)), d)?;
    let y = extract_matrix(&block_vector(&solution, &(dd..2 * dd)), d)?;
    Ok((x, y))
}

fn strictly_less(m: &Matrix, bound: &Matrix) -> bool {
    (0..m.dim()).all(|p| (0..m.dim()).all(|q| m.get(p, q) < bound.get(p, q)))
}

/// The joint-spectral embedding with an all-positive seed.
///
/// For strictly positive `A`, `B`, corrections `X < A`, `Y < B` are solved so
/// that the seed `(Γ̃(A−X), Γ̃(B−Y), ε·1, 1, ε)` is strictly positive while
/// the two 3-leaf combinations still reproduce `A` and `B` exactly in the
/// product block. ε starts at `epsilon0` and is halved (up to a cap) until
/// the corrections are strictly dominated.
pub fn embed_positive(a: &Matrix, b: &Matrix, epsilon0: &Scalar) -> Result<EmbeddedSystem> {
    let d = require_same_dims(a, b, "positive-seed embedding")?;
    for (name, m) in [("A", a), ("B", b)] {
        for p in 0..d {
            for q in 0..d {
                if !m.get(p, q).is_positive() {
                    return Err(Error::InvalidArgument(format!(
                        "positive-seed embedding needs strictly positive matrices; \
                         entry ({p},{q}) of {name} is {}",
                        m.get(p, q)
                    )));
                }
            }
        }
    }
    if !epsilon0.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "positive-seed embedding needs a positive starting ε, got {epsilon0}"
        )));
    }
    let mut epsilon = epsilon0.clone();
    for _ in 0..EPSILON_HALVING_CAP {
        match solve_corrections(a, b, &epsilon) {
            Ok((x, y)) if strictly_less(&x, a) && strictly_less(&y, b) => {
                let dd = d * d;
                let dim = 3 * dd + 2;
                let op = BilinearMap::from_coeffs(dim, joint_spectral_coeffs(d))?;
                let mut seed = Vector::zeros(dim);
                for p in 0..d {
                    for q in 0..d {
                        seed.set(p * d + q, a.get(p, q) - x.get(p, q));
                        seed.set(dd + p * d + q, b.get(p, q) - y.get(p, q));
                        seed.set(2 * dd + p * d + q, epsilon.clone());
                    }
                }
                seed.set(3 * dd, Scalar::one());
                seed.set(3 * dd + 1, epsilon.clone());
                let system = BilinearSystem::new(
                    dim,
                    vec![op],
                    vec![seed],
                    SignClass::Nonnegative,
                )?;
                return Ok(EmbeddedSystem {
                    system,
                    layout: matrix_block_layout(d, Vec::new()),
                    construction: Construction::PositiveSeed {
                        a: a.clone(),
                        b: b.clone(),
                        epsilon,
                        x,
                        y,
                    },
                });
            }
            Ok(_) | Err(Error::SingularSystem(_)) => {}
            Err(e) => return Err(e),
        }
        epsilon /= rat(2, 1);
    }
    Err(Error::CapExhausted {
        operation: "positive-seed embedding",
        cap: EPSILON_HALVING_CAP,
    })
}
