//! Bilinear systems, composition trees, and exact growth tables.
//!
//! A system is a finite set of bilinear operators `*` on `Q^d` together with a
//! finite set of seed vectors. Combining `n` seeds with `n−1` operator
//! applications (a *composition tree*) yields a vector; the growth function
//! `g(n)` is the largest entry over all such combinations, and the growth rate
//! is `limsup g(n)^{1/n}`. Everything here is exact: `g(n) = 0` really means
//! zero.
//!
//! For nonnegative systems the set of combination values at each size can be
//! collapsed to its Pareto front: bilinear maps with nonnegative coefficients
//! are monotone in each argument, so dominated vectors never contribute to any
//! larger combination or to any maximum. That front recurrence is the engine
//! behind `growth_table` and is oracle-tested against full tree enumeration.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{format_scalar, Scalar};

/// Whether all coefficients and seed entries are guaranteed nonnegative.
///
/// Nonnegative systems unlock the monotone machinery (growth fronts, liveness,
/// pattern fronts). General systems still evaluate trees and search for zero
/// vectors, where signs are the whole point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Nonnegative,
    General,
}

/// One bilinear operator on `Q^d`, stored sparsely:
/// `(x*y)_k = Σ c[(k,i,j)] · x_i · y_j`. No explicit zeros are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearMap {
    dim: usize,
    coeffs: BTreeMap<(usize, usize, usize), Scalar>,
}

impl BilinearMap {
    /// Builds an operator from `(k, i, j, c)` coefficients (0-based indices).
    /// Repeated `(k, i, j)` triples accumulate; zero totals are dropped.
    pub fn from_coeffs<I>(dim: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Scalar)>,
    {
        let mut map: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (k, i, j, c) in coeffs {
            for (context, index) in [("output index k", k), ("left index i", i), ("right index j", j)] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange {
                        context,
                        index,
                        dim,
                    });
                }
            }
            *map.entry((k, i, j)).or_insert_with(Scalar::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(BilinearMap { dim, coeffs: map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, k: usize, i: usize, j: usize) -> Scalar {
        self.coeffs.get(&(k, i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, &Scalar)> {
        self.coeffs.iter().map(|(&(k, i, j), c)| (k, i, j, c))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// `x * y`, exactly.
    pub fn apply(&self, x: &Vector, y: &Vector) -> Vector {
        assert_eq!(x.dim(), self.dim, "left argument dimension mismatch");
        assert_eq!(y.dim(), self.dim, "right argument dimension mismatch");
        let mut out = Vector::zeros(self.dim);
        for (&(k, i, j), c) in &self.coeffs {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            out.add_assign_at(k, c * &x[i] * &y[j]);
        }
        out
    }

    /// Matrix of the linear map `x ↦ x * r` (right argument fixed).
    pub fn right_matrix(&self, r: &Vector) -> Matrix {
        assert_eq!(r.dim(), self.dim, "fixed right argument dimension mismatch");
        let mut m = Matrix::zeros(self.dim);
        for (&(k, i, j), c) in &self.coeffs {
            if !r[j].is_zero() {
                m.add_assign_at(k, i, c * &r[j]);
            }
        }
        m
    }

    /// Matrix of the linear map `y ↦ l * y` (left argument fixed).
    pub fn left_matrix(&self, l: &Vector) -> Matrix {
        assert_eq!(l.dim(), self.dim, "fixed left argument dimension mismatch");
        let mut m = Matrix::zeros(self.dim);
        for (&(k, i, j), c) in &self.coeffs {
            if !l[i].is_zero() {
                m.add_assign_at(k, j, c * &l[i]);
            }
        }
        m
    }
}

/// A bilinear system: dimension, operators, seeds, and a sign class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearSystem {
    dim: usize,
    operators: Vec<BilinearMap>,
    seeds: Vec<Vector>,
    sign_class: SignClass,
}

impl BilinearSystem {
    pub fn new(
        dim: usize,
        operators: Vec<BilinearMap>,
        seeds: Vec<Vector>,
        sign_class: SignClass,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if operators.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one operator".into()));
        }
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one seed".into()));
        }
        for op in &operators {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "operator",
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        for seed in &seeds {
            if seed.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "seed",
                    expected: dim,
                    found: seed.dim(),
                });
            }
        }
        if sign_class == SignClass::Nonnegative {
            for op in &operators {
                for (k, _, _, c) in op.iter() {
                    if c.is_negative() {
                        return Err(Error::NegativeEntry {
                            context: "operator coefficient",
                            index: k,
                            value: format_scalar(c),
                        });
                    }
                }
            }
            for seed in &seeds {
                if let Some(i) = seed.first_negative() {
                    return Err(Error::NegativeEntry {
                        context: "seed entry",
                        index: i,
                        value: format_scalar(&seed[i]),
                    });
                }
            }
        }
        Ok(BilinearSystem {
            dim,
            operators,
            seeds,
            sign_class,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[BilinearMap] {
        &self.operators
    }

    pub fn operator(&self, index: usize) -> Result<&BilinearMap> {
        self.operators.get(index).ok_or(Error::NoSuchComponent {
            kind: "operator",
            index,
            count: self.operators.len(),
        })
    }

    pub fn seeds(&self) -> &[Vector] {
        &self.seeds
    }

    pub fn seed(&self, index: usize) -> Result<&Vector> {
        self.seeds.get(index).ok_or(Error::NoSuchComponent {
            kind: "seed",
            index,
            count: self.seeds.len(),
        })
    }

    pub fn sign_class(&self) -> SignClass {
        self.sign_class
    }

    /// Errors unless the system is declared nonnegative; used by every
    /// operation whose soundness rests on monotonicity.
    pub fn require_nonnegative(&self, operation: &'static str) -> Result<()> {
        if self.sign_class == SignClass::Nonnegative {
            Ok(())
        } else {
            Err(Error::SignsUnsupported {
                operation,
                context: "system has sign class General".into(),
            })
        }
    }
}

/// A combination of seeds: leaves pick seeds, internal nodes pick operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CompositionTree {
    Leaf { seed: usize },
    Node {
        op: usize,
        left: Box<CompositionTree>,
        right: Box<CompositionTree>,
    },
}

impl CompositionTree {
    pub fn leaf(seed: usize) -> Self {
        CompositionTree::Leaf { seed }
    }

    pub fn node(op: usize, left: CompositionTree, right: CompositionTree) -> Self {
        CompositionTree::Node {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of seed leaves (combination size `n`).
    pub fn leaf_count(&self) -> usize {
        match self {
            CompositionTree::Leaf { .. } => 1,
            CompositionTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Evaluates the combination in the given system.
    pub fn eval(&self, system: &BilinearSystem) -> Result<Vector> {
        match self {
            CompositionTree::Leaf { seed } => Ok(system.seed(*seed)?.clone()),
            CompositionTree::Node { op, left, right } => {
                let x = left.eval(system)?;
                let y = right.eval(system)?;
                Ok(system.operator(*op)?.apply(&x, &y))
            }
        }
    }

    /// Parenthesized rendering, e.g. `((s*s)*s)*((s*s)*s)`. Seed leaves use
    /// `seed_names`; when the system has several operators the operator name
    /// appears infix (`(a *f b)`). The outermost node carries no parentheses.
    pub fn render(&self, seed_names: &[String], op_names: &[String]) -> String {
        fn go(t: &CompositionTree, seeds: &[String], ops: &[String], top: bool) -> String {
            match t {
                CompositionTree::Leaf { seed } => seeds
                    .get(*seed)
                    .cloned()
                    .unwrap_or_else(|| format!("s{}", seed + 1)),
                CompositionTree::Node { op, left, right } => {
                    let l = go(left, seeds, ops, false);
                    let r = go(right, seeds, ops, false);
                    let infix = if ops.len() > 1 {
                        format!(" *{} ", ops.get(*op).cloned().unwrap_or_else(|| (op + 1).to_string()))
                    } else {
                        "*".to_string()
                    };
                    if top {
                        format!("{l}{infix}{r}")
                    } else {
                        format!("({l}{infix}{r})")
                    }
                }
            }
        }
        go(self, seed_names, op_names, true)
    }

    /// Rendering for single-seed, single-operator contexts: every leaf is `s`.
    pub fn render_plain(&self) -> String {
        self.render(&["s".to_string()], &["*".to_string()])
    }
}

/// Evaluates a composition tree against a system, bottom-up and exactly.
/// Free-function form of [`CompositionTree::eval`].
pub fn eval_tree(system: &BilinearSystem, tree: &CompositionTree) -> Result<Vector> {
    tree.eval(system)
}

/// All composition trees with exactly `n` leaves, in canonical order:
/// left subtree size ascending, then left subtree, then right subtree, then
/// operator index; leaves by seed index.
pub fn enumerate_trees(n: usize, num_seeds: usize, num_ops: usize) -> Result<Vec<CompositionTree>> {
    if n == 0 {
        return Err(Error::InvalidArgument("a combination has at least one seed".into()));
    }
    if num_seeds == 0 || num_ops == 0 {
        return Err(Error::InvalidArgument(
            "tree enumeration needs at least one seed and one operator".into(),
        ));
    }
    let mut by_size: Vec<Vec<CompositionTree>> = Vec::with_capacity(n + 1);
    by_size.push(Vec::new()); // size 0 unused
    by_size.push((0..num_seeds).map(CompositionTree::leaf).collect());
    for size in 2..=n {
        let mut out = Vec::new();
        for n1 in 1..size {
            let n2 = size - n1;
            for left in &by_size[n1] {
                for right in &by_size[n2] {
                    for op in 0..num_ops {
                        out.push(CompositionTree::node(op, left.clone(), right.clone()));
                    }
                }
            }
        }
        by_size.push(out);
    }
    Ok(by_size.pop().expect("built up to n"))
}

/// Number of composition trees with `n` leaves:
/// `Catalan(n−1) · num_ops^(n−1) · num_seeds^n`.
pub fn tree_count(n: usize, num_seeds: usize, num_ops: usize) -> u128 {
    let catalan = |m: u128| -> u128 {
        // C_m = binom(2m, m)/(m+1), incrementally
        let mut c: u128 = 1;
        for i in 0..m {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    };
    let n = n as u128;
    catalan(n - 1) * (num_ops as u128).pow((n - 1) as u32) * (num_seeds as u128).pow(n as u32)
}

/// Keeps only vectors not dominated by another (entrywise ≤ with ≠ somewhere);
/// duplicates collapse to one. Errors if any entry is negative, since Pareto
/// pruning is only meaningful under the monotonicity of nonnegative systems.
pub fn pareto_prune(vectors: Vec<Vector>) -> Result<Vec<Vector>> {
    for v in &vectors {
        if let Some(i) = v.first_negative() {
            return Err(Error::NegativeEntry {
                context: "pareto_prune input",
                index: i,
                value: format_scalar(&v[i]),
            });
        }
    }
    Ok(prune_with(vectors.into_iter().map(|v| (v, ())).collect())
        .into_iter()
        .map(|(v, ())| v)
        .collect())
}

/// Domination pruning that carries witnesses along. Earlier entries win ties,
/// so insertion order decides which witness survives for equal values.
pub(crate) fn prune_with<W>(entries: Vec<(Vector, W)>) -> Vec<(Vector, W)> {
    let mut kept: Vec<(Vector, W)> = Vec::new();
    for (v, w) in entries {
        if kept.iter().any(|(u, _)| v.le(u)) {
            continue; // dominated by (or equal to) something already kept
        }
        kept.retain(|(u, _)| !u.le(&v));
        kept.push((v, w));
    }
    kept
}

/// One maximal combination value at a given size, with a tree achieving it.
#[derive(Debug, Clone)]
pub struct FrontEntry {
    pub value: Vector,
    pub witness: CompositionTree,
}

/// Growth data for one combination size.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: usize,
    pub front: Vec<FrontEntry>,
    /// `g_i(n)` for every coordinate.
    pub per_dim: Vec<Scalar>,
    /// `g(n) = max_i g_i(n)`.
    pub max: Scalar,
}

/// Exact growth table `g(n)`, `g_i(n)` for `n = 1..=n_max`, with Pareto fronts
/// of achievable values and witness trees.
#[derive(Debug, Clone)]
pub struct GrowthTable {
    rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub fn max_n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, n: usize) -> Option<&GrowthRow> {
        if n == 0 {
            return None;
        }
        self.rows.get(n - 1)
    }

    pub fn rows(&self) -> &[GrowthRow] {
        &self.rows
    }

    /// `g(n)`.
    pub fn g(&self, n: usize) -> Option<&Scalar> {
        self.row(n).map(|r| &r.max)
    }

    /// `g_i(n)` (0-based coordinate).
    pub fn g_dim(&self, n: usize, i: usize) -> Option<&Scalar> {
        self.row(n).and_then(|r| r.per_dim.get(i))
    }

    /// The Pareto front of achievable values at size `n`.
    pub fn front(&self, n: usize) -> Option<&[FrontEntry]> {
        self.row(n).map(|r| r.front.as_slice())
    }
}

/// Computes the growth table for `n = 1..=n_max` by the front recurrence
/// `front(n) = prune(∪_{n1+n2=n, op} front(n1) ⊛_op front(n2))`.
///
/// Exact for nonnegative systems: monotonicity makes dominated values
/// irrelevant both to later fronts and to every `g_i`. Errors on a system
/// declared `General`.
pub fn growth_table(system: &BilinearSystem, n_max: usize) -> Result<GrowthTable> {
    system.require_nonnegative("growth_table")?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("growth_table needs n_max ≥ 1".into()));
    }
    let mut fronts: Vec<Vec<FrontEntry>> = Vec::with_capacity(n_max + 1);
    fronts.push(Vec::new()); // size 0 unused

    let seed_entries: Vec<(Vector, CompositionTree)> = system
        .seeds()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), CompositionTree::leaf(i)))
        .collect();
    fronts.push(
        prune_with(seed_entries)
            .into_iter()
            .map(|(value, witness)| FrontEntry { value, witness })
            .collect(),
    );

    for n in 2..=n_max {
        let mut candidates: Vec<(Vector, CompositionTree)> = Vec::new();
        for n1 in 1..n {
            let n2 = n - n1;
            for e1 in &fronts[n1] {
                for e2 in &fronts[n2] {
                    for (op_idx, op) in system.operators().iter().enumerate() {
                        let value = op.apply(&e1.value, &e2.value);
                        let witness =
                            CompositionTree::node(op_idx, e1.witness.clone(), e2.witness.clone());
                        candidates.push((value, witness));
                    }
                }
            }
        }
        fronts.push(
            prune_with(candidates)
                .into_iter()
                .map(|(value, witness)| FrontEntry { value, witness })
                .collect(),
        );
    }

    let rows = (1..=n_max)
        .map(|n| {
            let front = fronts[n].clone();
            let per_dim: Vec<Scalar> = (0..system.dim())
                .map(|i| {
                    front
                        .iter()
                        .map(|e| e.value[i].clone())
                        .max()
                        .unwrap_or_else(Scalar::zero)
                })
                .collect();
            let max = per_dim.iter().cloned().max().unwrap_or_else(Scalar::zero);
            GrowthRow {
                n,
                front,
                per_dim,
                max,
            }
        })
        .collect();
    Ok(GrowthTable { rows })
}

/// Which coordinates can ever be positive, with a witness tree for each.
#[derive(Debug, Clone)]
pub struct Liveness {
    witnesses: Vec<Option<CompositionTree>>,
}

impl Liveness {
    pub fn is_live(&self, i: usize) -> bool {
        self.witnesses.get(i).map(|w| w.is_some()).unwrap_or(false)
    }

    /// A smallest-found tree whose value is positive at coordinate `i`.
    pub fn witness(&self, i: usize) -> Option<&CompositionTree> {
        self.witnesses.get(i).and_then(|w| w.as_ref())
    }

    pub fn live_set(&self) -> BTreeSet<usize> {
        self.witnesses
            .iter()
            .enumerate()
            .filter_map(|(i, w)| w.as_ref().map(|_| i))
            .collect()
    }

    pub fn all_live(&self) -> bool {
        self.witnesses.iter().all(|w| w.is_some())
    }

    pub fn any_live(&self) -> bool {
        self.witnesses.iter().any(|w| w.is_some())
    }
}

/// Boolean support fixpoint: a dimension is live iff some seed is positive
/// there, or some coefficient `c[(k,i,j)] > 0` has both `i` and `j` live.
/// Exact for nonnegative systems, because each bilinear term takes its two
/// factors from independent subtrees.
pub fn live_dimensions(system: &BilinearSystem) -> Result<Liveness> {
    system.require_nonnegative("live_dimensions")?;
    let d = system.dim();
    let mut witnesses: Vec<Option<CompositionTree>> = vec![None; d];
    for (seed_idx, seed) in system.seeds().iter().enumerate() {
        for k in 0..d {
            if seed[k].is_positive() && witnesses[k].is_none() {
                witnesses[k] = Some(CompositionTree::leaf(seed_idx));
            }
        }
    }
    loop {
        let mut changed = false;
        for (op_idx, op) in system.operators().iter().enumerate() {
            for (k, i, j, c) in op.iter() {
                if witnesses[k].is_none() && c.is_positive() {
                    if let (Some(wi), Some(wj)) = (&witnesses[i], &witnesses[j]) {
                        witnesses[k] =
                            Some(CompositionTree::node(op_idx, wi.clone(), wj.clone()));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Liveness { witnesses })
}

/// Restricts the system to its live dimensions. Returns the reduced system and
/// the kept (old) coordinate indices in ascending order. Growth values on live
/// coordinates are untouched: a coefficient involving a dead index contributes
/// nothing to any combination.
pub fn eliminate_degenerate(system: &BilinearSystem) -> Result<(BilinearSystem, Vec<usize>)> {
    let liveness = live_dimensions(system)?;
    let kept: Vec<usize> = liveness.live_set().into_iter().collect();
    if kept.is_empty() {
        return Err(Error::EmptySystem);
    }
    let mut new_index = vec![usize::MAX; system.dim()];
    for (new, &old) in kept.iter().enumerate() {
        new_index[old] = new;
    }
    let d = kept.len();
    let operators = system
        .operators()
        .iter()
        .map(|op| {
            BilinearMap::from_coeffs(
                d,
                op.iter().filter_map(|(k, i, j, c)| {
                    let (nk, ni, nj) = (new_index[k], new_index[i], new_index[j]);
                    if nk != usize::MAX && ni != usize::MAX && nj != usize::MAX {
                        Some((nk, ni, nj, c.clone()))
                    } else {
                        None
                    }
                }),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let seeds = system
        .seeds()
        .iter()
        .map(|s| Vector::new(kept.iter().map(|&old| s[old].clone()).collect()))
        .collect();
    let reduced = BilinearSystem::new(d, operators, seeds, system.sign_class())?;
    Ok((reduced, kept))
}
